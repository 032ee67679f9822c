#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace chromoseg {

// How a lower node is brought up to the resolution of the level above.
enum class UpsampleMode {
  kBilinear,    // channel preserving; lower node contributes f(i+1) channels
  kTransposed,  // learned 2x2 stride-2 transposed conv mapping f(i+1) -> f(i)
};

// "bilinear" | "transposed"; throws InvalidInput otherwise.
UpsampleMode parse_upsample_mode(const std::string& name);
std::string to_string(UpsampleMode mode);

struct GeneratorConfig {
  std::array<int, 5> filters{64, 128, 256, 512, 1024};
  int in_channels = 1;
  int classes = 4;
  int input_size = 128;
  UpsampleMode upsample = UpsampleMode::kBilinear;

  static constexpr int kDepth = 5;

  // Throws InvalidInput when filters are not strictly increasing, or the
  // input size is not divisible by 2^(depth-1).
  void validate() const;
};

// Channel triple of the nested block at grid position (level, column).
struct NodePlan {
  int level = 0;
  int column = 0;
  int in_channels = 0;
  int mid_channels = 0;
  int out_channels = 0;

  friend bool operator==(const NodePlan&, const NodePlan&) = default;
};

// Nodes exist where level + column <= depth - 1. Throws InvalidInput outside.
NodePlan channel_plan(int level, int column, const GeneratorConfig& cfg);

// All nodes in evaluation order: column-major, then by level.
std::vector<NodePlan> node_plans(const GeneratorConfig& cfg);

// Trainable parameters: two 3x3 conv (+bias) / batch-norm (scale+shift)
// stages per node, optional transposed-conv up edges, and the 1x1 head.
std::int64_t generator_parameter_count(const GeneratorConfig& cfg);

struct DiscriminatorConfig {
  std::array<int, 5> channels{64, 128, 256, 512, 1};
  std::array<int, 5> strides{2, 2, 2, 2, 1};
  std::array<int, 5> paddings{2, 2, 2, 2, 2};
  int kernel = 4;
  double leaky_slope = 0.2;
  int in_channels = 5;  // source image + class probability map
  bool logistic_output = true;

  // Alternative stride schedule with the last two layers at stride 1.
  static DiscriminatorConfig pix2pix_strides();
};

// Conv arithmetic: floor((n + 2p - k) / s) + 1 per layer.
int discriminator_output_size(int input_size, const DiscriminatorConfig& cfg);

// Side length of the input window that one output score depends on.
int discriminator_receptive_field(const DiscriminatorConfig& cfg);

std::int64_t discriminator_parameter_count(const DiscriminatorConfig& cfg);

}  // namespace chromoseg
