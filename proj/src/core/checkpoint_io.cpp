#include "chromoseg/checkpoint_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>

#include "chromoseg/error.hpp"

namespace chromoseg::checkpoint {

namespace {

constexpr const char* kFormat = "chromoseg-checkpoint";
constexpr int kVersion = 1;

std::uint32_t to_little(std::uint32_t bits) {
  if constexpr (std::endian::native == std::endian::little) {
    return bits;
  } else {
    return ((bits & 0xFFu) << 24) | ((bits & 0xFF00u) << 8) | ((bits >> 8) & 0xFF00u) | (bits >> 24);
  }
}

std::int64_t element_count(const std::vector<std::int64_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>());
}

std::filesystem::path data_path_for(const std::filesystem::path& manifest_path) {
  auto p = manifest_path;
  return p.replace_extension(".bin");
}

}  // namespace

const Section* Checkpoint::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

void save(const std::filesystem::path& manifest_path, const Checkpoint& ckpt) {
  if (manifest_path.extension() != ".json") throw IoError("checkpoint manifest must end in .json");
  if (manifest_path.has_parent_path()) std::filesystem::create_directories(manifest_path.parent_path());
  const auto data_path = data_path_for(manifest_path);

  nlohmann::json manifest{{"format", kFormat},
                          {"version", kVersion},
                          {"byte_order", "little"},
                          {"data_file", data_path.filename().string()},
                          {"metadata", ckpt.metadata}};
  nlohmann::json sections = nlohmann::json::array();
  std::ofstream bin(data_path, std::ios::binary);
  if (!bin) throw IoError("cannot write " + data_path.string());
  std::uint64_t offset = 0;
  for (const auto& section : ckpt.sections) {
    nlohmann::json tensors = nlohmann::json::array();
    for (const auto& t : section.tensors) {
      if (element_count(t.shape) != static_cast<std::int64_t>(t.values.size())) {
        throw InvalidInput("tensor " + t.name + " has a shape inconsistent with its data");
      }
      tensors.push_back({{"name", t.name},
                         {"shape", t.shape},
                         {"dtype", "float32"},
                         {"kind", t.kind},
                         {"offset", offset},
                         {"count", t.values.size()}});
      for (const float v : t.values) {
        const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(v));
        bin.write(reinterpret_cast<const char*>(&bits), sizeof bits);
      }
      offset += t.values.size() * sizeof(float);
    }
    sections.push_back({{"name", section.name}, {"config", section.config}, {"tensors", tensors}});
  }
  if (!bin) throw IoError("failed writing " + data_path.string());
  manifest["sections"] = sections;
  std::ofstream out(manifest_path);
  if (!out) throw IoError("cannot write " + manifest_path.string());
  out << manifest.dump(2) << '\n';
}

Checkpoint load(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("checkpoint manifest not found: " + manifest_path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt checkpoint manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != kFormat || manifest.value("version", 0) != kVersion) {
    throw IoError("unsupported checkpoint format in " + manifest_path.string());
  }
  const auto data_path = manifest_path.parent_path() / manifest.at("data_file").get<std::string>();
  std::ifstream bin(data_path, std::ios::binary);
  if (!bin) throw IoError("checkpoint data file not found: " + data_path.string());
  const auto file_size = std::filesystem::file_size(data_path);

  Checkpoint ckpt;
  ckpt.metadata = manifest.value("metadata", nlohmann::json::object());
  try {
    for (const auto& js : manifest.at("sections")) {
      Section section;
      section.name = js.at("name").get<std::string>();
      section.config = js.value("config", nlohmann::json::object());
      for (const auto& jt : js.at("tensors")) {
        TensorRecord t;
        t.name = jt.at("name").get<std::string>();
        t.shape = jt.at("shape").get<std::vector<std::int64_t>>();
        t.kind = jt.value("kind", "parameter");
        if (jt.at("dtype").get<std::string>() != "float32") throw IoError("unsupported dtype for " + t.name);
        const auto offset = jt.at("offset").get<std::uint64_t>();
        const auto count = jt.at("count").get<std::uint64_t>();
        if (static_cast<std::int64_t>(count) != element_count(t.shape) ||
            offset + count * sizeof(float) > file_size) {
          throw IoError("checkpoint tensor " + t.name + " is truncated or inconsistent");
        }
        std::vector<std::uint32_t> raw(count);
        bin.seekg(static_cast<std::streamoff>(offset));
        bin.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * sizeof(float)));
        if (!bin) throw IoError("failed reading tensor " + t.name);
        t.values.resize(count);
        for (std::size_t i = 0; i < count; ++i) t.values[i] = std::bit_cast<float>(to_little(raw[i]));
        section.tensors.push_back(std::move(t));
      }
      ckpt.sections.push_back(std::move(section));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt checkpoint manifest: " + std::string(e.what()));
  }
  return ckpt;
}

}  // namespace chromoseg::checkpoint
