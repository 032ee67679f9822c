#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chromoseg::oracle {

double mean_jaccard_loss(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt, int classes) {
  double total = 0.0;
  for (int c = 0; c < classes; ++c) {
    int inter = 0, uni = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      const bool p = pred[i] == c;
      const bool g = gt[i] == c;
      inter += p && g;
      uni += p || g;
    }
    total += uni == 0 ? 0.0 : 1.0 - static_cast<double>(inter) / uni;
  }
  return total / classes;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double frac(double num, double den) { return den == 0 ? kNaN : num / den; }

double brute_hausdorff(const LabelMap& a, const LabelMap& b, int c) {
  std::vector<std::pair<int, int>> pa, pb;
  for (int r = 0; r < a.rows(); ++r)
    for (int k = 0; k < a.cols(); ++k) {
      if (a(r, k) == c) pa.emplace_back(r, k);
      if (b(r, k) == c) pb.emplace_back(r, k);
    }
  if (pa.empty() || pb.empty()) return kNaN;
  auto directed = [](const auto& x, const auto& y) {
    double worst = 0.0;
    for (const auto& [r1, c1] : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [r2, c2] : y) best = std::min(best, std::hypot(r1 - r2, c1 - c2));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

}  // namespace

BruteMetrics brute_metrics(const LabelMap& pred, const LabelMap& gt, int classes) {
  BruteMetrics m;
  double correct = 0.0;
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c) correct += pred(r, c) == gt(r, c);
  m.accuracy = correct / static_cast<double>(gt.rows() * gt.cols());
  for (int k = 0; k < classes; ++k) {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (int r = 0; r < gt.rows(); ++r) {
      for (int c = 0; c < gt.cols(); ++c) {
        const bool p = pred(r, c) == k;
        const bool g = gt(r, c) == k;
        tp += p && g;
        fp += p && !g;
        fn += !p && g;
        tn += !p && !g;
      }
    }
    const bool absent = tp + fp + fn == 0;
    m.dice.push_back(absent ? 1.0 : frac(2 * tp, 2 * tp + fp + fn));
    m.iou.push_back(absent ? 1.0 : frac(tp, tp + fp + fn));
    m.precision.push_back(absent ? 1.0 : frac(tp, tp + fp));
    m.recall.push_back(absent ? 1.0 : frac(tp, tp + fn));
    m.fnr.push_back(absent ? 0.0 : frac(fn, tp + fn));
    m.fpr.push_back(frac(fp, fp + tn));
    m.hausdorff.push_back(brute_hausdorff(gt, pred, k));
  }
  return m;
}

std::vector<double> finite_difference(const std::function<double(std::span<const double>)>& f,
                                      std::span<const double> x, double step) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  double num = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(num) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

}  // namespace chromoseg::oracle
