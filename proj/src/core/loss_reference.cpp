#include "chromoseg/loss_reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chromoseg/error.hpp"

namespace chromoseg::losses {

LossKind parse_loss_kind(const std::string& name) {
  if (name == "lovasz") return LossKind::kLovasz;
  if (name == "ce") return LossKind::kCrossEntropy;
  if (name == "weighted_ce") return LossKind::kWeightedCrossEntropy;
  if (name == "dice") return LossKind::kDice;
  if (name == "weighted_dice") return LossKind::kWeightedDice;
  throw InvalidInput("unknown loss kind '" + name + "'");
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kLovasz: return "lovasz";
    case LossKind::kCrossEntropy: return "ce";
    case LossKind::kWeightedCrossEntropy: return "weighted_ce";
    case LossKind::kDice: return "dice";
    case LossKind::kWeightedDice: return "weighted_dice";
  }
  return "unknown";
}

void LossConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be finite and >= 0");
  for (const double w : class_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("class weights must be positive");
  }
}

namespace reference {
namespace {

void check_shapes(std::span<const double> probs, std::span<const std::uint8_t> labels, int classes) {
  if (classes <= 0 || probs.size() != labels.size() * static_cast<std::size_t>(classes)) {
    throw InvalidInput("probability map and label map sizes do not match");
  }
  for (const auto y : labels)
    if (y >= classes) throw InvalidInput("label outside the class range");
}

std::vector<double> weights_or_ones(std::span<const double> weights, int classes) {
  if (weights.empty()) return std::vector<double>(static_cast<std::size_t>(classes), 1.0);
  if (weights.size() != static_cast<std::size_t>(classes)) throw InvalidInput("one weight per class required");
  for (const double w : weights)
    if (!(w > 0.0)) throw InvalidInput("class weights must be positive");
  return {weights.begin(), weights.end()};
}

}  // namespace

std::vector<double> lovasz_grad(std::span<const std::uint8_t> gt_sorted) {
  const std::size_t p = gt_sorted.size();
  std::vector<double> grad(p);
  if (p == 0) return grad;
  const double total = std::accumulate(gt_sorted.begin(), gt_sorted.end(), 0.0);
  double cum_gt = 0.0;
  double cum_not = 0.0;
  double previous = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    cum_gt += gt_sorted[k];
    cum_not += 1.0 - gt_sorted[k];
    const double intersection = total - cum_gt;
    const double uni = total + cum_not;
    const double jaccard = 1.0 - intersection / uni;
    grad[k] = k == 0 ? jaccard : jaccard - previous;
    previous = jaccard;
  }
  return grad;
}

ValueAndGrad lovasz_extension(std::span<const double> errors, std::span<const std::uint8_t> gt) {
  if (errors.size() != gt.size()) throw InvalidInput("error and indicator lengths differ");
  const std::size_t p = errors.size();
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Descending by error, ties by pixel index.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return errors[a] > errors[b]; });
  std::vector<std::uint8_t> gt_sorted(p);
  for (std::size_t k = 0; k < p; ++k) gt_sorted[k] = gt[order[k]];
  const auto g = lovasz_grad(gt_sorted);

  ValueAndGrad out{0.0, std::vector<double>(p, 0.0)};
  for (std::size_t k = 0; k < p; ++k) {
    out.value += errors[order[k]] * g[k];
    out.grad[order[k]] = g[k];
  }
  return out;
}

ValueAndGrad lovasz_softmax(std::span<const double> probs, std::span<const std::uint8_t> labels,
                            int classes, bool present_classes_only) {
  check_shapes(probs, labels, classes);
  const std::size_t pixels = labels.size();
  ValueAndGrad out{0.0, std::vector<double>(probs.size(), 0.0)};
  std::vector<double> errors(pixels);
  std::vector<std::uint8_t> gt(pixels);
  int counted = 0;
  std::vector<int> used;
  for (int c = 0; c < classes; ++c) {
    bool present = false;
    for (std::size_t i = 0; i < pixels; ++i) {
      gt[i] = labels[i] == c ? 1 : 0;
      present = present || gt[i];
      const double f = probs[static_cast<std::size_t>(c) * pixels + i];
      errors[i] = gt[i] ? 1.0 - f : f;
    }
    if (present_classes_only && !present) continue;
    const auto ext = lovasz_extension(errors, gt);
    out.value += ext.value;
    for (std::size_t i = 0; i < pixels; ++i) {
      out.grad[static_cast<std::size_t>(c) * pixels + i] += gt[i] ? -ext.grad[i] : ext.grad[i];
    }
    ++counted;
  }
  if (counted == 0) return out;
  out.value /= counted;
  for (auto& g : out.grad) g /= counted;
  return out;
}

ValueAndGrad cross_entropy(std::span<const double> probs, std::span<const std::uint8_t> labels,
                           int classes, std::span<const double> class_weights) {
  check_shapes(probs, labels, classes);
  const auto w = weights_or_ones(class_weights, classes);
  const std::size_t pixels = labels.size();
  ValueAndGrad out{0.0, std::vector<double>(probs.size(), 0.0)};
  double norm = 0.0;
  for (std::size_t i = 0; i < pixels; ++i) norm += w[labels[i]];
  if (norm == 0.0) return out;
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::size_t at = static_cast<std::size_t>(labels[i]) * pixels + i;
    const double wi = w[labels[i]];
    out.value -= wi * std::log(probs[at]);
    out.grad[at] = -wi / (probs[at] * norm);
  }
  out.value /= norm;
  return out;
}

ValueAndGrad soft_dice_loss(std::span<const double> probs, std::span<const std::uint8_t> labels,
                            int classes, std::span<const double> class_weights) {
  check_shapes(probs, labels, classes);
  const auto w = weights_or_ones(class_weights, classes);
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  const std::size_t pixels = labels.size();
  ValueAndGrad out{1.0, std::vector<double>(probs.size(), 0.0)};
  for (int c = 0; c < classes; ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * pixels;
    double overlap = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < pixels; ++i) {
      const double q = labels[i] == c ? 1.0 : 0.0;
      overlap += probs[base + i] * q;
      mass += probs[base + i] + q;
    }
    const double num = 2.0 * overlap + kDiceSmoothing;
    const double den = mass + kDiceSmoothing;
    const double scale = w[static_cast<std::size_t>(c)] / wsum;
    out.value -= scale * num / den;
    for (std::size_t i = 0; i < pixels; ++i) {
      const double q = labels[i] == c ? 1.0 : 0.0;
      out.grad[base + i] = -scale * (2.0 * q * den - num) / (den * den);
    }
  }
  return out;
}

double lsgan_discriminator_loss(std::span<const double> real_scores, std::span<const double> fake_scores) {
  if (real_scores.size() != fake_scores.size() || real_scores.empty()) {
    throw InvalidInput("real and fake score maps must be non-empty and equally shaped");
  }
  double real = 0.0;
  double fake = 0.0;
  for (const double r : real_scores) real += (r - 1.0) * (r - 1.0);
  for (const double f : fake_scores) fake += f * f;
  const auto n = static_cast<double>(real_scores.size());
  return real / n + fake / n;
}

double lsgan_generator_loss(std::span<const double> fake_scores) {
  if (fake_scores.empty()) throw InvalidInput("empty score map");
  double acc = 0.0;
  for (const double f : fake_scores) acc += (f - 1.0) * (f - 1.0);
  return acc / static_cast<double>(fake_scores.size());
}

}  // namespace reference
}  // namespace chromoseg::losses
