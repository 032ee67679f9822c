#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace chromoseg::checkpoint {

struct TensorRecord {
  std::string name;
  std::vector<std::int64_t> shape;
  std::string kind = "parameter";  // or "buffer" (e.g. batch-norm statistics)
  std::vector<float> values;
};

struct Section {
  std::string name;  // "generator" or "discriminator"
  nlohmann::json config;
  std::vector<TensorRecord> tensors;
};

struct Checkpoint {
  std::vector<Section> sections;
  nlohmann::json metadata = nlohmann::json::object();

  const Section* find(const std::string& name) const;
};

// Writes `<stem>.json` (manifest: name, shape, dtype, byte offset of every
// tensor) and `<stem>.bin` (little-endian float32 in manifest order).
// `manifest_path` must end in .json.
void save(const std::filesystem::path& manifest_path, const Checkpoint& ckpt);

// Throws IoError for missing, truncated or inconsistent checkpoints.
Checkpoint load(const std::filesystem::path& manifest_path);

}  // namespace chromoseg::checkpoint
