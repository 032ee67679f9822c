#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace chromoseg::losses {

enum class LossKind { kLovasz, kCrossEntropy, kWeightedCrossEntropy, kDice, kWeightedDice };

LossKind parse_loss_kind(const std::string& name);
std::string to_string(LossKind kind);
inline constexpr std::array<LossKind, 5> kAllLossKinds{
    LossKind::kCrossEntropy, LossKind::kWeightedCrossEntropy, LossKind::kDice,
    LossKind::kWeightedDice, LossKind::kLovasz};

inline constexpr double kDiceSmoothing = 1e-6;

struct LossConfig {
  double lambda = 10.0;
  std::array<double, 4> class_weights{1.0, 1.0, 1.0, 1.0};
  LossKind kind = LossKind::kLovasz;
  // Average the Lovasz term only over classes present in the labels.
  bool present_classes_only = false;
  // Lovasz per image and averaged over the batch (true) or over the
  // flattened batch (false).
  bool per_image = true;

  // Throws InvalidInput for lambda < 0 or non-positive class weights.
  void validate() const;
};

// Double-precision single-image implementations with hand-derived gradients.
// Probabilities are channel-major: probs[c * pixels + i].
namespace reference {

struct ValueAndGrad {
  double value = 0.0;
  std::vector<double> grad;  // same layout as probs
};

// Gradient of the Lovasz extension of the Jaccard loss at a sorted
// ground-truth indicator.
std::vector<double> lovasz_grad(std::span<const std::uint8_t> gt_sorted);

// Single-class Lovasz extension of errors against gt; grad w.r.t. errors.
ValueAndGrad lovasz_extension(std::span<const double> errors, std::span<const std::uint8_t> gt);

ValueAndGrad lovasz_softmax(std::span<const double> probs, std::span<const std::uint8_t> labels,
                            int classes, bool present_classes_only = false);

// Mean (optionally class-weighted) negative log-likelihood of the true class.
ValueAndGrad cross_entropy(std::span<const double> probs, std::span<const std::uint8_t> labels,
                           int classes, std::span<const double> class_weights = {});

// 1 - (weighted) mean over classes of the smoothed soft Dice.
ValueAndGrad soft_dice_loss(std::span<const double> probs, std::span<const std::uint8_t> labels,
                            int classes, std::span<const double> class_weights = {});

double lsgan_discriminator_loss(std::span<const double> real_scores,
                                std::span<const double> fake_scores);
double lsgan_generator_loss(std::span<const double> fake_scores);

}  // namespace reference
}  // namespace chromoseg::losses
