#include "chromoseg/nn/generator.hpp"

#include <string>

#include "chromoseg/error.hpp"

namespace chromoseg::nn {

namespace F = torch::nn::functional;

NestedBlockImpl::NestedBlockImpl(const NodePlan& plan) {
  conv1_ = register_module(
      "conv1", torch::nn::Conv2d(torch::nn::Conv2dOptions(plan.in_channels, plan.mid_channels, 3).padding(1)));
  bn1_ = register_module("bn1", torch::nn::BatchNorm2d(plan.mid_channels));
  conv2_ = register_module(
      "conv2", torch::nn::Conv2d(torch::nn::Conv2dOptions(plan.mid_channels, plan.out_channels, 3).padding(1)));
  bn2_ = register_module("bn2", torch::nn::BatchNorm2d(plan.out_channels));
}

torch::Tensor NestedBlockImpl::forward(const torch::Tensor& x) {
  auto y = torch::relu(bn1_(conv1_(x)));
  return torch::relu(bn2_(conv2_(y)));
}

GeneratorImpl::GeneratorImpl(GeneratorConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  constexpr int depth = GeneratorConfig::kDepth;
  nodes_.resize(static_cast<std::size_t>(depth * depth), nullptr);
  if (cfg_.upsample == UpsampleMode::kTransposed) ups_.resize(nodes_.size(), nullptr);
  plans_ = node_plans(cfg_);
  for (const auto& plan : plans_) {
    const std::string tag = std::to_string(plan.level) + "_" + std::to_string(plan.column);
    nodes_[slot(plan.level, plan.column)] = register_module("x" + tag, NestedBlock(plan));
    if (cfg_.upsample == UpsampleMode::kTransposed && plan.column > 0) {
      ups_[slot(plan.level, plan.column)] = register_module(
          "up" + tag, torch::nn::ConvTranspose2d(torch::nn::ConvTranspose2dOptions(
                          cfg_.filters[plan.level + 1], cfg_.filters[plan.level], 2)
                                                     .stride(2)));
    }
  }
  head_ = register_module("head", torch::nn::Conv2d(torch::nn::Conv2dOptions(cfg_.filters[0], cfg_.classes, 1)));
}

std::size_t GeneratorImpl::slot(int level, int column) const {
  return static_cast<std::size_t>(level * GeneratorConfig::kDepth + column);
}

torch::Tensor GeneratorImpl::up(int level, int column, const torch::Tensor& lower) {
  if (cfg_.upsample == UpsampleMode::kTransposed) return ups_[slot(level, column)](lower);
  return F::interpolate(lower, F::InterpolateFuncOptions()
                                   .scale_factor(std::vector<double>{2.0, 2.0})
                                   .mode(torch::kBilinear)
                                   .align_corners(true));
}

torch::Tensor GeneratorImpl::logits(const torch::Tensor& image) {
  if (image.dim() != 4 || image.size(1) != cfg_.in_channels || image.size(2) != cfg_.input_size ||
      image.size(3) != cfg_.input_size) {
    throw InvalidInput("generator expects [B, " + std::to_string(cfg_.in_channels) + ", " +
                       std::to_string(cfg_.input_size) + ", " + std::to_string(cfg_.input_size) +
                       "] input");
  }
  constexpr int depth = GeneratorConfig::kDepth;
  std::vector<torch::Tensor> out(static_cast<std::size_t>(depth * depth));
  for (int column = 0; column < depth; ++column) {
    for (int level = 0; level + column < depth; ++level) {
      torch::Tensor input;
      if (column == 0) {
        input = level == 0 ? image : F::max_pool2d(out[slot(level - 1, 0)], F::MaxPool2dFuncOptions(2));
      } else {
        std::vector<torch::Tensor> parts;
        for (int k = 0; k < column; ++k) parts.push_back(out[slot(level, k)]);
        parts.push_back(up(level, column, out[slot(level + 1, column - 1)]));
        for (const auto& p : parts) {
          TORCH_CHECK(p.size(2) == parts.front().size(2) && p.size(3) == parts.front().size(3),
                      "spatial mismatch at node ", level, ",", column);
        }
        input = torch::cat(parts, 1);
      }
      out[slot(level, column)] = nodes_[slot(level, column)](input);
    }
  }
  return head_(out[slot(0, depth - 1)]);
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& image) {
  return torch::softmax(logits(image), 1);
}

std::int64_t count_trainable_parameters(torch::nn::Module& module) {
  std::int64_t n = 0;
  for (const auto& p : module.parameters())
    if (p.requires_grad()) n += p.numel();
  return n;
}

torch::Tensor argmax_labels(const torch::Tensor& probs) { return probs.argmax(1); }

}  // namespace chromoseg::nn
