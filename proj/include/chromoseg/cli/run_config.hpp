#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "chromoseg/data.hpp"
#include "chromoseg/nn/train.hpp"

namespace chromoseg::cli {

// Everything a training run depends on. Defaults reproduce the published
// protocol: 80/20 split with seed 123, batch 64, Lovasz loss with lambda 10,
// adversarial training on, Adam(2e-4, 0.5, 0.999), 15-epoch patience.
struct RunConfig {
  std::filesystem::path dataset;
  data::LoadOptions load;
  std::filesystem::path split_manifest;  // optional: reuse a prepared split
  double split_ratio = 0.8;
  std::uint64_t split_seed = 123;
  // Keep only the first N training indices (0 keeps all).
  std::size_t train_subset = 0;
  // Keep only the first N evaluation indices (0 keeps all).
  std::size_t test_subset = 0;
  nn::TrainConfig train;
  std::filesystem::path output_dir = "run";

  // Throws InvalidInput when the dataset path is missing or settings are
  // out of range.
  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& cfg);
void from_json(const nlohmann::json& j, RunConfig& cfg);

// Reads a config file; a run manifest is accepted too (its "config" key).
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json split_to_json(const data::DatasetSplit& split);
data::DatasetSplit split_from_json(const nlohmann::json& j);

// Comma-separated integers, e.g. "8,16,32,64,128".
std::array<int, 5> parse_filters(const std::string& text);

}  // namespace chromoseg::cli
