#include "chromoseg/nn/discriminator.hpp"

#include <string>

#include "chromoseg/error.hpp"

namespace chromoseg::nn {

DiscriminatorImpl::DiscriminatorImpl(DiscriminatorConfig cfg) : cfg_(cfg) {
  int in = cfg_.in_channels;
  for (std::size_t k = 0; k < cfg_.channels.size(); ++k) {
    auto conv = torch::nn::Conv2d(torch::nn::Conv2dOptions(in, cfg_.channels[k], cfg_.kernel)
                                      .stride(cfg_.strides[k])
                                      .padding(cfg_.paddings[k]));
    layers_.push_back(register_module("conv" + std::to_string(k + 1), conv));
    in = cfg_.channels[k];
  }
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& input) {
  if (input.dim() != 4 || input.size(1) != cfg_.in_channels) {
    throw InvalidInput("discriminator expects [B, " + std::to_string(cfg_.in_channels) + ", H, W] input");
  }
  auto x = input;
  for (std::size_t k = 0; k + 1 < layers_.size(); ++k) {
    x = torch::leaky_relu(layers_[k](x), cfg_.leaky_slope);
  }
  x = layers_.back()(x);
  return cfg_.logistic_output ? torch::sigmoid(x) : x;
}

torch::Tensor DiscriminatorImpl::score(const torch::Tensor& image, const torch::Tensor& segmap) {
  if (image.dim() != 4 || segmap.dim() != 4 || image.size(0) != segmap.size(0) ||
      image.size(2) != segmap.size(2) || image.size(3) != segmap.size(3)) {
    throw InvalidInput("image and segmentation map must share batch and spatial dimensions");
  }
  return forward(torch::cat({image, segmap}, 1));
}

}  // namespace chromoseg::nn
