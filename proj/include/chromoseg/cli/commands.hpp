#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chromoseg/cli/run_config.hpp"
#include "chromoseg/metrics.hpp"

namespace chromoseg::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitNonFinite = 3;

struct PrepareOptions {
  std::filesystem::path dataset;
  data::LoadOptions load;
  double split_ratio = 0.8;
  std::uint64_t split_seed = 123;
  std::filesystem::path output_dir = "prepared";
  bool write_corpus = true;  // canonical corpus.h5 copy
};

// Loads and validates the corpus, writes split.json and (optionally) a
// canonical corpus.h5. Returns the split.
data::DatasetSplit run_prepare(const PrepareOptions& opts, std::ostream& log);

// Trains, evaluates the best checkpoint on the test and overlap-test sets
// and writes run_manifest.json into the output directory.
void run_train(const RunConfig& cfg, std::ostream& log);

enum class EvalSubset { kTest, kOverlapTest, kTrain };
EvalSubset parse_eval_subset(const std::string& name);
std::string to_string(EvalSubset subset);

struct EvaluateOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path dataset;
  data::LoadOptions load;
  // split.json or a run manifest; empty means resplit with ratio/seed.
  std::filesystem::path split;
  double split_ratio = 0.8;
  std::uint64_t split_seed = 123;
  EvalSubset subset = EvalSubset::kTest;
  std::size_t limit = 0;  // 0: all indices of the subset
  bool hausdorff = true;
  std::filesystem::path output_dir = "eval";
};

metrics::MetricsReport run_evaluate(const EvaluateOptions& opts, std::ostream& log);

struct SegmentOptions {
  std::filesystem::path checkpoint;
  std::vector<std::filesystem::path> inputs;  // gray PNGs, 94x93 or 128x128
  std::filesystem::path output_dir = "segmented";
};

void run_segment(const SegmentOptions& opts, std::ostream& log);

struct DiffOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path dataset;
  data::LoadOptions load;
  std::vector<std::size_t> indices;
  std::filesystem::path output_dir = "diff";
};

void run_diff(const DiffOptions& opts, std::ostream& log);

struct ReportOptions {
  // name=path pairs; path is a report.json or a run directory.
  std::vector<std::string> runs;
  std::string scope = "all";  // all | foreground | both
  std::filesystem::path output = "table.csv";
};

void run_report(const ReportOptions& opts, std::ostream& log);

}  // namespace chromoseg::cli
