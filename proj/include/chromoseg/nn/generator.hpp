#pragma once

#include <torch/torch.h>

#include <vector>

#include "chromoseg/architecture.hpp"

namespace chromoseg::nn {

// Two (3x3 conv, pad 1) -> batch norm -> ReLU stages.
class NestedBlockImpl : public torch::nn::Module {
 public:
  explicit NestedBlockImpl(const NodePlan& plan);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d conv1_{nullptr};
  torch::nn::BatchNorm2d bn1_{nullptr};
  torch::nn::Conv2d conv2_{nullptr};
  torch::nn::BatchNorm2d bn2_{nullptr};
};
TORCH_MODULE(NestedBlock);

// Nested U-shape network over the triangular node grid. Node (i, 0) reads
// the max-pooled node above it; node (i, j>0) reads every earlier node on
// its level plus the up-sampled node (i+1, j-1). A 1x1 head on node (0, 4)
// produces class logits.
class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(GeneratorConfig cfg = {});

  // [B, in_channels, S, S] -> per-pixel class probabilities [B, C, S, S].
  torch::Tensor forward(const torch::Tensor& image);
  torch::Tensor logits(const torch::Tensor& image);

  const GeneratorConfig& config() const { return cfg_; }
  const std::vector<NodePlan>& plans() const { return plans_; }
  std::size_t node_count() const { return plans_.size(); }

 private:
  std::size_t slot(int level, int column) const;
  torch::Tensor up(int level, int column, const torch::Tensor& lower);

  GeneratorConfig cfg_;
  std::vector<NodePlan> plans_;
  std::vector<NestedBlock> nodes_;                // indexed by slot()
  std::vector<torch::nn::ConvTranspose2d> ups_;   // transposed mode only
  torch::nn::Conv2d head_{nullptr};
};
TORCH_MODULE(Generator);

std::int64_t count_trainable_parameters(torch::nn::Module& module);

// Per-pixel argmax; ties go to the lowest class index.
torch::Tensor argmax_labels(const torch::Tensor& probs);

}  // namespace chromoseg::nn
