#pragma once

#include <torch/torch.h>

#include "chromoseg/loss_reference.hpp"

namespace chromoseg::nn {

// All segmentation losses take probabilities [B, C, H, W] and integer labels
// [B, H, W]; each image is reduced on its own and the batch is averaged.

// Lovasz extension gradient for a sorted 0/1 indicator (last dim).
torch::Tensor lovasz_grad(const torch::Tensor& gt_sorted);

torch::Tensor lovasz_softmax(const torch::Tensor& probs, const torch::Tensor& labels,
                             const losses::LossConfig& cfg = {});

// `class_weights` may be undefined for the unweighted form.
torch::Tensor cross_entropy(const torch::Tensor& probs, const torch::Tensor& labels,
                            const torch::Tensor& class_weights = {});
torch::Tensor soft_dice_loss(const torch::Tensor& probs, const torch::Tensor& labels,
                             const torch::Tensor& class_weights = {});

// Dispatches on cfg.kind.
torch::Tensor segmentation_loss(const torch::Tensor& probs, const torch::Tensor& labels,
                                const losses::LossConfig& cfg);

torch::Tensor lsgan_discriminator_loss(const torch::Tensor& real_scores, const torch::Tensor& fake_scores);
torch::Tensor lsgan_generator_loss(const torch::Tensor& fake_scores);

struct GeneratorLoss {
  torch::Tensor total;
  torch::Tensor adversarial;
  torch::Tensor segmentation;
};

// adversarial + lambda * segmentation. An undefined `fake_scores` drops the
// adversarial term (GAN disabled).
GeneratorLoss generator_objective(const torch::Tensor& fake_scores, const torch::Tensor& probs,
                                  const torch::Tensor& labels, const losses::LossConfig& cfg);

}  // namespace chromoseg::nn
