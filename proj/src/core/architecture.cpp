#include "chromoseg/architecture.hpp"

#include <string>

#include "chromoseg/error.hpp"

namespace chromoseg {

void GeneratorConfig::validate() const {
  for (int i = 1; i < kDepth; ++i) {
    if (filters[i] <= filters[i - 1]) throw InvalidInput("generator filters must be strictly increasing");
  }
  if (filters[0] <= 0 || in_channels <= 0 || classes <= 1) {
    throw InvalidInput("generator channel counts must be positive (and at least two classes)");
  }
  if (input_size <= 0 || input_size % (1 << (kDepth - 1)) != 0) {
    throw InvalidInput("input size must be a positive multiple of 16");
  }
}

NodePlan channel_plan(int level, int column, const GeneratorConfig& cfg) {
  const int depth = GeneratorConfig::kDepth;
  if (level < 0 || column < 0 || level + column > depth - 1) {
    throw InvalidInput("node (" + std::to_string(level) + "," + std::to_string(column) +
                       ") is outside the triangular grid");
  }
  NodePlan plan{level, column, 0, cfg.filters[level], cfg.filters[level]};
  if (column == 0) {
    // Max-pooling keeps the channel count of the node above.
    plan.in_channels = level == 0 ? cfg.in_channels : cfg.filters[level - 1];
  } else {
    const int from_below =
        cfg.upsample == UpsampleMode::kBilinear ? cfg.filters[level + 1] : cfg.filters[level];
    plan.in_channels = cfg.filters[level] * column + from_below;
  }
  return plan;
}

std::vector<NodePlan> node_plans(const GeneratorConfig& cfg) {
  std::vector<NodePlan> plans;
  const int depth = GeneratorConfig::kDepth;
  for (int column = 0; column < depth; ++column)
    for (int level = 0; level + column < depth; ++level) plans.push_back(channel_plan(level, column, cfg));
  return plans;
}

std::int64_t generator_parameter_count(const GeneratorConfig& cfg) {
  std::int64_t total = 0;
  for (const auto& p : node_plans(cfg)) {
    const std::int64_t in = p.in_channels;
    const std::int64_t mid = p.mid_channels;
    const std::int64_t out = p.out_channels;
    total += in * mid * 9 + mid + 2 * mid;
    total += mid * out * 9 + out + 2 * out;
    if (cfg.upsample == UpsampleMode::kTransposed && p.column > 0) {
      const std::int64_t lower = cfg.filters[p.level + 1];
      total += lower * cfg.filters[p.level] * 4 + cfg.filters[p.level];
    }
  }
  total += static_cast<std::int64_t>(cfg.filters[0]) * cfg.classes + cfg.classes;
  return total;
}

DiscriminatorConfig DiscriminatorConfig::pix2pix_strides() {
  DiscriminatorConfig cfg;
  cfg.strides = {2, 2, 2, 1, 1};
  return cfg;
}

int discriminator_output_size(int input_size, const DiscriminatorConfig& cfg) {
  int n = input_size;
  for (std::size_t k = 0; k < cfg.channels.size(); ++k) {
    n = (n + 2 * cfg.paddings[k] - cfg.kernel) / cfg.strides[k] + 1;
    if (n <= 0) throw InvalidInput("input too small for the discriminator");
  }
  return n;
}

int discriminator_receptive_field(const DiscriminatorConfig& cfg) {
  // Walk back from one output unit: r_in = (r_out - 1) * s + k.
  int field = 1;
  for (std::size_t k = cfg.channels.size(); k-- > 0;) field = (field - 1) * cfg.strides[k] + cfg.kernel;
  return field;
}

std::int64_t discriminator_parameter_count(const DiscriminatorConfig& cfg) {
  std::int64_t total = 0;
  std::int64_t in = cfg.in_channels;
  for (const int out : cfg.channels) {
    total += in * out * cfg.kernel * cfg.kernel + out;
    in = out;
  }
  return total;
}

UpsampleMode parse_upsample_mode(const std::string& name) {
  if (name == "bilinear") return UpsampleMode::kBilinear;
  if (name == "transposed") return UpsampleMode::kTransposed;
  throw InvalidInput("unknown upsample mode '" + name + "'");
}

std::string to_string(UpsampleMode mode) {
  return mode == UpsampleMode::kBilinear ? "bilinear" : "transposed";
}

}  // namespace chromoseg
