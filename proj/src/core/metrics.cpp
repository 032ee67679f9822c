#include "chromoseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chromoseg/error.hpp"

namespace chromoseg::metrics {

ConfusionMatrix::ConfusionMatrix(int classes)
    : classes_(classes), counts_(static_cast<std::size_t>(classes * classes), 0) {}

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::true_positives(int c) const { return at(c, c); }

std::int64_t ConfusionMatrix::false_positives(int c) const {
  std::int64_t n = 0;
  for (int t = 0; t < classes_; ++t)
    if (t != c) n += at(t, c);
  return n;
}

std::int64_t ConfusionMatrix::false_negatives(int c) const {
  std::int64_t n = 0;
  for (int p = 0; p < classes_; ++p)
    if (p != c) n += at(c, p);
  return n;
}

std::int64_t ConfusionMatrix::true_negatives(int c) const {
  return total() - true_positives(c) - false_positives(c) - false_negatives(c);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw InvalidInput("confusion matrices differ in class count");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

std::vector<double> ConfusionMatrix::row_normalized() const {
  std::vector<double> out(counts_.size(), 0.0);
  for (int t = 0; t < classes_; ++t) {
    std::int64_t row = 0;
    for (int p = 0; p < classes_; ++p) row += at(t, p);
    if (row == 0) continue;
    for (int p = 0; p < classes_; ++p)
      out[index(t, p)] = static_cast<double>(at(t, p)) / static_cast<double>(row);
  }
  return out;
}

ConfusionMatrix confusion_matrix(const LabelMap& pred, const LabelMap& gt, int classes) {
  if (!pred.same_shape(gt)) throw InvalidInput("prediction and ground truth shapes differ");
  ConfusionMatrix cm(classes);
  const auto p = pred.values();
  const auto g = gt.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= classes || g[i] >= classes) throw InvalidInput("label outside the class range");
    ++cm.at(g[i], p[i]);
  }
  return cm;
}

double pixel_accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw InvalidInput("accuracy of an empty confusion matrix");
  std::int64_t trace = 0;
  for (int c = 0; c < cm.classes(); ++c) trace += cm.at(c, c);
  return static_cast<double>(trace) / static_cast<double>(total);
}

namespace {

Score ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return {};
  return {static_cast<double>(num) / static_cast<double>(den), true, false};
}

}  // namespace

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm) {
  std::vector<ClassMetrics> out(static_cast<std::size_t>(cm.classes()));
  for (int c = 0; c < cm.classes(); ++c) {
    const auto tp = cm.true_positives(c);
    const auto fp = cm.false_positives(c);
    const auto fn = cm.false_negatives(c);
    const auto tn = cm.true_negatives(c);
    auto& m = out[static_cast<std::size_t>(c)];
    if (tp + fp + fn == 0) {
      const Score one{1.0, true, true};
      const Score zero{0.0, true, true};
      m = {one, one, one, one, zero, ratio(fp, fp + tn)};
      m.fpr.absent = true;
      continue;
    }
    m.dice = ratio(2 * tp, 2 * tp + fp + fn);
    m.iou = ratio(tp, tp + fp + fn);
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.fnr = ratio(fn, tp + fn);
    m.fpr = ratio(fp, fp + tn);
  }
  return out;
}

std::vector<Point> class_points(const LabelMap& map, int cls) {
  std::vector<Point> pts;
  for (int r = 0; r < map.rows(); ++r)
    for (int c = 0; c < map.cols(); ++c)
      if (map(r, c) == cls) pts.push_back({r, c});
  return pts;
}

namespace {

// sup over a of inf over b, squared, with b sorted by (row, col). For each
// point of a the scan walks outwards from its row in b and stops once the
// row gap alone exceeds the nearest distance found, or once that distance
// can no longer raise the running maximum. Both cut-offs are exact.
std::int64_t directed_squared(std::span<const Point> a, std::span<const Point> b) {
  std::int64_t worst = 0;
  for (const auto& p : a) {
    std::int64_t nearest = std::numeric_limits<std::int64_t>::max();
    const auto start = std::lower_bound(b.begin(), b.end(), p.row,
                                        [](const Point& q, int row) { return q.row < row; });
    auto visit = [&](const Point& q) {
      const std::int64_t dr = p.row - q.row;
      const std::int64_t dc = p.col - q.col;
      nearest = std::min(nearest, dr * dr + dc * dc);
    };
    auto down = start;
    auto up = start;
    bool down_open = down != b.end();
    bool up_open = up != b.begin();
    while ((down_open || up_open) && nearest > worst) {
      if (down_open) {
        const std::int64_t gap = down->row - p.row;
        if (gap * gap > nearest) {
          down_open = false;
        } else {
          visit(*down);
          down_open = ++down != b.end();
        }
      }
      if (up_open) {
        const auto& q = *(up - 1);
        const std::int64_t gap = p.row - q.row;
        if (gap * gap > nearest) {
          up_open = false;
        } else {
          visit(q);
          up_open = --up != b.begin();
        }
      }
    }
    worst = std::max(worst, nearest);
  }
  return worst;
}

std::vector<Point> sorted_points(std::span<const Point> pts) {
  std::vector<Point> out(pts.begin(), pts.end());
  std::sort(out.begin(), out.end(),
            [](const Point& x, const Point& y) { return x.row != y.row ? x.row < y.row : x.col < y.col; });
  return out;
}

}  // namespace

std::optional<double> hausdorff(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) return std::nullopt;
  const auto sa = sorted_points(a);
  const auto sb = sorted_points(b);
  const auto d = std::max(directed_squared(a, sb), directed_squared(b, sa));
  return std::sqrt(static_cast<double>(d));
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::kAccuracy: return "Acc";
    case Metric::kDice: return "Dice";
    case Metric::kIoU: return "IoU";
    case Metric::kPrecision: return "Precision";
    case Metric::kRecall: return "Recall";
    case Metric::kFnr: return "FNR";
    case Metric::kFpr: return "FPR";
    case Metric::kHausdorff: return "Hausdorff";
  }
  return "?";
}

SampleMetrics evaluate_sample(const LabelMap& pred, const LabelMap& gt, int classes, bool with_hausdorff) {
  SampleMetrics out;
  out.confusion = confusion_matrix(pred, gt, classes);
  out.accuracy = pixel_accuracy(out.confusion);
  out.classes = per_class_metrics(out.confusion);
  out.hausdorff.assign(static_cast<std::size_t>(classes), Score{});
  if (!with_hausdorff) return out;
  out.hausdorff.clear();
  for (int c = 0; c < classes; ++c) {
    const auto a = class_points(gt, c);
    const auto b = class_points(pred, c);
    const auto h = hausdorff(a, b);
    out.hausdorff.push_back(h ? Score{*h, true, false} : Score{});
  }
  return out;
}

namespace {

const Score& pick(const SampleMetrics& s, Metric m, std::size_t c) {
  const auto& cm = s.classes[c];
  switch (m) {
    case Metric::kDice: return cm.dice;
    case Metric::kIoU: return cm.iou;
    case Metric::kPrecision: return cm.precision;
    case Metric::kRecall: return cm.recall;
    case Metric::kFnr: return cm.fnr;
    case Metric::kFpr: return cm.fpr;
    case Metric::kHausdorff: return s.hausdorff[c];
    case Metric::kAccuracy: break;
  }
  throw InvalidInput("accuracy is not a per-class metric");
}

}  // namespace

MetricsReport aggregate_report(std::span<const SampleMetrics> samples) {
  if (samples.empty()) throw InvalidInput("cannot aggregate zero samples");
  MetricsReport r;
  r.samples = samples.size();
  r.classes = static_cast<int>(samples.front().classes.size());
  r.confusion = ConfusionMatrix(r.classes);
  const auto nc = static_cast<std::size_t>(r.classes);
  r.absent.assign(nc, 0);

  double acc = 0.0;
  for (const auto& s : samples) {
    acc += s.accuracy;
    r.confusion += s.confusion;
    for (std::size_t c = 0; c < nc; ++c)
      if (s.classes[c].iou.absent) ++r.absent[c];
  }
  r.accuracy = acc / static_cast<double>(samples.size());

  for (const Metric m : kAllMetrics) {
    if (m == Metric::kAccuracy) continue;
    const auto mi = static_cast<std::size_t>(m);
    r.per_class[mi].assign(nc, std::numeric_limits<double>::quiet_NaN());
    r.excluded[mi].assign(nc, 0);
    for (std::size_t c = 0; c < nc; ++c) {
      double sum = 0.0;
      std::size_t used = 0;
      for (const auto& s : samples) {
        const Score& sc = pick(s, m, c);
        if (sc.defined) {
          sum += sc.value;
          ++used;
        } else {
          ++r.excluded[mi][c];
        }
      }
      if (used > 0) r.per_class[mi][c] = sum / static_cast<double>(used);
    }
  }
  return r;
}

double MetricsReport::class_value(Metric m, int cls) const {
  if (m == Metric::kAccuracy) return accuracy;
  return per_class[static_cast<std::size_t>(m)].at(static_cast<std::size_t>(cls));
}

double MetricsReport::mean(Metric m, ClassScope scope) const {
  if (m == Metric::kAccuracy) return accuracy;
  const auto& values = per_class[static_cast<std::size_t>(m)];
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t c = scope == ClassScope::kForeground ? 1 : 0; c < values.size(); ++c) {
    if (std::isnan(values[c])) continue;
    sum += values[c];
    ++used;
  }
  return used == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(used);
}

}  // namespace chromoseg::metrics
