#include "chromoseg/cli/run_config.hpp"

#include <sstream>

#include "chromoseg/error.hpp"
#include "chromoseg/report.hpp"

namespace chromoseg::cli {

void RunConfig::validate() const {
  if (dataset.empty()) throw InvalidInput("no dataset given (--dataset)");
  if (!std::filesystem::exists(dataset)) throw InvalidInput("dataset not found: " + dataset.string());
  if (!split_manifest.empty() && !std::filesystem::exists(split_manifest)) {
    throw InvalidInput("split manifest not found: " + split_manifest.string());
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw InvalidInput("split ratio must lie in (0, 1)");
  train.validate();
}

void to_json(nlohmann::json& j, const RunConfig& cfg) {
  j = {{"dataset", cfg.dataset.string()},
       {"layout", data::to_string(cfg.load.layout)},
       {"published_array", cfg.load.published_array},
       {"split_manifest", cfg.split_manifest.string()},
       {"split_ratio", cfg.split_ratio},
       {"split_seed", cfg.split_seed},
       {"train_subset", cfg.train_subset},
       {"test_subset", cfg.test_subset},
       {"train", cfg.train},
       {"output_dir", cfg.output_dir.string()}};
}

void from_json(const nlohmann::json& j, RunConfig& cfg) {
  cfg.dataset = j.value("dataset", cfg.dataset.string());
  if (j.contains("layout")) cfg.load.layout = data::parse_layout(j.at("layout").get<std::string>());
  cfg.load.published_array = j.value("published_array", cfg.load.published_array);
  cfg.split_manifest = j.value("split_manifest", cfg.split_manifest.string());
  cfg.split_ratio = j.value("split_ratio", cfg.split_ratio);
  cfg.split_seed = j.value("split_seed", cfg.split_seed);
  cfg.train_subset = j.value("train_subset", cfg.train_subset);
  cfg.test_subset = j.value("test_subset", cfg.test_subset);
  if (j.contains("train")) j.at("train").get_to(cfg.train);
  cfg.output_dir = j.value("output_dir", cfg.output_dir.string());
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const auto j = report::read_json(path);
  RunConfig cfg;
  try {
    (j.contains("config") ? j.at("config") : j).get_to(cfg);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("invalid config " + path.string() + ": " + e.what());
  }
  return cfg;
}

nlohmann::json split_to_json(const data::DatasetSplit& split) {
  return {{"seed", split.seed},
          {"ratio", split.ratio},
          {"shuffle", "mt19937_64 + rejection-sampled Fisher-Yates"},
          {"counts",
           {{"corpus", split.corpus_size},
            {"train", split.train_indices.size()},
            {"test", split.test_indices.size()},
            {"overlap_test", split.overlap_test_indices.size()}}},
          {"train_indices", split.train_indices},
          {"test_indices", split.test_indices},
          {"overlap_test_indices", split.overlap_test_indices}};
}

data::DatasetSplit split_from_json(const nlohmann::json& j) {
  data::DatasetSplit s;
  try {
    s.seed = j.at("seed").get<std::uint64_t>();
    s.ratio = j.at("ratio").get<double>();
    s.corpus_size = j.at("counts").at("corpus").get<std::size_t>();
    s.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
    s.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
    s.overlap_test_indices = j.at("overlap_test_indices").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed split manifest: ") + e.what());
  }
  return s;
}

std::array<int, 5> parse_filters(const std::string& text) {
  std::array<int, 5> out{};
  std::istringstream in(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(in, item, ',')) {
    if (n == out.size()) throw InvalidInput("expected exactly five filter counts");
    try {
      out[n++] = std::stoi(item);
    } catch (const std::exception&) {
      throw InvalidInput("bad filter count '" + item + "'");
    }
  }
  if (n != out.size()) throw InvalidInput("expected exactly five filter counts");
  return out;
}

}  // namespace chromoseg::cli
