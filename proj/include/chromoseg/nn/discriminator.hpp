#pragma once

#include <torch/torch.h>

#include "chromoseg/architecture.hpp"

namespace chromoseg::nn {

// Patch discriminator over (source image, class map) pairs: five 4x4 convs,
// leaky ReLU after the first four, logistic squashing after the last.
class DiscriminatorImpl : public torch::nn::Module {
 public:
  explicit DiscriminatorImpl(DiscriminatorConfig cfg = {});

  // [B, in_channels, H, W] -> patch scores [B, 1, h, w].
  torch::Tensor forward(const torch::Tensor& input);

  // Concatenates image [B,1,H,W] and segmentation map [B,C,H,W] on the
  // channel axis and scores the pair. Throws InvalidInput on shape mismatch.
  torch::Tensor score(const torch::Tensor& image, const torch::Tensor& segmap);

  const DiscriminatorConfig& config() const { return cfg_; }

 private:
  DiscriminatorConfig cfg_;
  std::vector<torch::nn::Conv2d> layers_;
};
TORCH_MODULE(Discriminator);

}  // namespace chromoseg::nn
