#include "chromoseg/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <torch/torch.h>

#include "chromoseg/error.hpp"
#include "chromoseg/imaging.hpp"
#include "chromoseg/nn/checkpoint.hpp"
#include "chromoseg/nn/train.hpp"
#include "chromoseg/report.hpp"

namespace chromoseg::cli {

namespace fs = std::filesystem;

namespace {

std::vector<data::PreparedSample> prepare_all(const std::vector<data::RawSample>& raw) {
  std::vector<data::PreparedSample> out;
  out.reserve(raw.size());
  for (const auto& s : raw) out.push_back(data::prepare_sample(s));
  return out;
}

std::vector<LabelMap> raw_labels(const std::vector<data::RawSample>& raw) {
  std::vector<LabelMap> out;
  out.reserve(raw.size());
  for (const auto& s : raw) out.push_back(s.label);
  return out;
}

data::DatasetSplit make_split(const std::vector<data::RawSample>& raw, double ratio, std::uint64_t seed) {
  auto split = data::split_dataset(raw.size(), ratio, seed);
  split.overlap_test_indices = data::filter_overlap(split, raw_labels(raw));
  return split;
}

// Accepts split.json or a run manifest carrying a "split" object.
data::DatasetSplit read_split(const fs::path& path, std::size_t corpus_size) {
  const auto j = report::read_json(path);
  auto split = split_from_json(j.contains("split") ? j.at("split") : j);
  if (split.corpus_size != corpus_size) {
    throw InvalidInput("split " + path.string() + " was made for " + std::to_string(split.corpus_size) +
                       " samples but the corpus has " + std::to_string(corpus_size));
  }
  return split;
}

void truncate(std::vector<std::size_t>& v, std::size_t n) {
  if (n > 0 && n < v.size()) v.resize(n);
}

nlohmann::json history_summary(const nn::TrainState& state) {
  nlohmann::json j = state;
  return j;
}

nlohmann::json environment() {
  return {{"libtorch", TORCH_VERSION},
          {"compiler", __VERSION__},
          {"device", "cpu"},
          {"intra_op_threads", torch::get_num_threads()},
          {"deterministic_algorithms", at::globalContext().deterministicAlgorithms()}};
}

// Settings the networks take from libtorch defaults.
nlohmann::json framework_defaults(const nn::TrainConfig& cfg) {
  return {{"batch_norm", {{"eps", 1e-5}, {"momentum", 0.1}}},
          {"weight_init", "libtorch defaults (Kaiming-uniform conv weights, uniform biases), seeded by train.seed"},
          {"discriminator_receptive_field", discriminator_receptive_field(cfg.discriminator)},
          {"discriminator_output_size", discriminator_output_size(cfg.generator.input_size, cfg.discriminator)},
          {"generator_parameters", generator_parameter_count(cfg.generator)}};
}

struct TimedReport {
  metrics::MetricsReport report;
  double seconds_per_image = 0.0;
};

TimedReport timed_evaluate(nn::Generator& g, std::span<const data::PreparedSample> corpus,
                           std::span<const std::size_t> indices, bool hausdorff) {
  // Inference time only; metric computation is excluded.
  const auto start = std::chrono::steady_clock::now();
  std::vector<FloatImage> images;
  for (const auto i : indices) images.push_back(corpus[i].image);
  nn::segment(g, images);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {nn::evaluate(g, corpus, indices, hausdorff), secs / static_cast<double>(indices.size())};
}

std::string iso_time_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

data::DatasetSplit run_prepare(const PrepareOptions& opts, std::ostream& log) {
  const auto raw = data::load_dataset(opts.dataset, opts.load);
  const auto split = make_split(raw, opts.split_ratio, opts.split_seed);
  fs::create_directories(opts.output_dir);
  report::write_json(opts.output_dir / "split.json", split_to_json(split));
  if (opts.write_corpus) data::save_canonical(opts.output_dir / "corpus.h5", raw);
  log << "samples " << raw.size() << ": train " << split.train_indices.size() << ", test "
      << split.test_indices.size() << ", overlap test " << split.overlap_test_indices.size() << '\n';
  return split;
}

void run_train(const RunConfig& cfg_in, std::ostream& log) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  const auto raw = data::load_dataset(cfg.dataset, cfg.load);
  auto split = cfg.split_manifest.empty() ? make_split(raw, cfg.split_ratio, cfg.split_seed)
                                          : read_split(cfg.split_manifest, raw.size());
  truncate(split.train_indices, cfg.train_subset);
  truncate(split.test_indices, cfg.test_subset);
  truncate(split.overlap_test_indices, cfg.test_subset);
  const auto corpus = prepare_all(raw);

  cfg.train.output_dir = cfg.output_dir;
  fs::create_directories(cfg.output_dir);
  at::globalContext().setDeterministicAlgorithms(true, /*warn_only=*/true);
  nlohmann::json manifest{{"started", iso_time_now()},
                          {"config", cfg},
                          {"environment", environment()},
                          {"framework_defaults", framework_defaults(cfg.train)},
                          {"split", split_to_json(split)}};
  report::write_json(cfg.output_dir / "run_manifest.json", manifest);

  const auto on_epoch = [&log](const nn::EpochRecord& r, nn::Trainer&) {
    log << "epoch " << r.epoch << " g_total " << r.losses.g_total << " g_seg " << r.losses.g_seg << " g_adv "
        << r.losses.g_adv << " d " << r.losses.d_loss << " train_fg_dice " << r.train_dice
        << (r.checkpointed ? " *" : "") << '\n';
  };
  nn::FitOutputs out;
  try {
    out = nn::fit(corpus, split, cfg.train, on_epoch);
  } catch (const nn::NonFiniteLoss& e) {
    manifest["failed"] = {{"reason", e.what()}, {"batch_indices", e.batch_indices()}};
    report::write_json(cfg.output_dir / "run_manifest.json", manifest);
    throw;
  }

  manifest["resolved_train_config"] = out.resolved;
  manifest["training"] = history_summary(out.state);
  manifest["checkpoints"] = {{"best", out.best_checkpoint.string()}, {"last", out.last_checkpoint.string()}};

  // No epoch produced a finite Dice: fall back to the last weights.
  const fs::path chosen = fs::exists(out.best_checkpoint) ? out.best_checkpoint : out.last_checkpoint;
  manifest["evaluated_checkpoint"] = chosen.string();
  nn::Generator best = nn::load_generator(chosen);
  nlohmann::json evals;
  for (const auto& [name, indices] : {std::pair{std::string("test"), split.test_indices},
                                      std::pair{std::string("overlap_test"), split.overlap_test_indices}}) {
    if (indices.empty()) continue;
    const auto [rep, per_image] = timed_evaluate(best, corpus, indices, true);
    const auto dir = cfg.output_dir / ("eval_" + name);
    auto j = report::to_json(rep);
    j["seconds_per_image"] = per_image;
    report::write_json(dir / "report.json", j);
    report::write_json(dir / "confusion.json", report::confusion_to_json(rep.confusion));
    report::write_text(dir / "report.csv", report::csv_header() + report::csv_row(name, rep, metrics::ClassScope::kAll) +
                                               report::csv_row(name, rep, metrics::ClassScope::kForeground));
    evals[name] = {{"samples", rep.samples}, {"seconds_per_image", per_image}, {"report", (dir / "report.json").string()}};
    log << name << ": Dice(all) " << rep.mean(metrics::Metric::kDice, metrics::ClassScope::kAll) << " IoU(all) "
        << rep.mean(metrics::Metric::kIoU, metrics::ClassScope::kAll) << '\n';
  }
  manifest["evaluation"] = evals;
  manifest["finished"] = iso_time_now();
  report::write_json(cfg.output_dir / "run_manifest.json", manifest);
}

EvalSubset parse_eval_subset(const std::string& name) {
  if (name == "test") return EvalSubset::kTest;
  if (name == "overlap" || name == "overlap_test") return EvalSubset::kOverlapTest;
  if (name == "train") return EvalSubset::kTrain;
  throw InvalidInput("unknown subset '" + name + "' (test, overlap, train)");
}

std::string to_string(EvalSubset s) {
  switch (s) {
    case EvalSubset::kTest: return "test";
    case EvalSubset::kOverlapTest: return "overlap_test";
    case EvalSubset::kTrain: return "train";
  }
  return "test";
}

metrics::MetricsReport run_evaluate(const EvaluateOptions& opts, std::ostream& log) {
  const auto raw = data::load_dataset(opts.dataset, opts.load);
  const auto split = opts.split.empty() ? make_split(raw, opts.split_ratio, opts.split_seed)
                                        : read_split(opts.split, raw.size());
  auto indices = opts.subset == EvalSubset::kTest          ? split.test_indices
                 : opts.subset == EvalSubset::kOverlapTest ? split.overlap_test_indices
                                                           : split.train_indices;
  truncate(indices, opts.limit);
  if (indices.empty()) throw InvalidInput("subset " + to_string(opts.subset) + " is empty");

  nn::Generator gen = nn::load_generator(opts.checkpoint);
  const auto corpus = prepare_all(raw);
  const auto [rep, per_image] = timed_evaluate(gen, corpus, indices, opts.hausdorff);

  fs::create_directories(opts.output_dir);
  auto j = report::to_json(rep);
  j["seconds_per_image"] = per_image;
  j["checkpoint"] = opts.checkpoint.string();
  j["subset"] = to_string(opts.subset);
  report::write_json(opts.output_dir / "report.json", j);
  report::write_json(opts.output_dir / "confusion.json", report::confusion_to_json(rep.confusion));
  const auto name = to_string(opts.subset);
  report::write_text(opts.output_dir / "report.csv", report::csv_header() +
                                                         report::csv_row(name, rep, metrics::ClassScope::kAll) +
                                                         report::csv_row(name, rep, metrics::ClassScope::kForeground));
  log << name << " (" << rep.samples << " samples): Acc " << rep.accuracy << " Dice(all) "
      << rep.mean(metrics::Metric::kDice, metrics::ClassScope::kAll) << '\n';
  return rep;
}

void run_segment(const SegmentOptions& opts, std::ostream& log) {
  if (opts.inputs.empty()) throw InvalidInput("no input images");
  nn::Generator gen = nn::load_generator(opts.checkpoint);
  fs::create_directories(opts.output_dir);
  for (const auto& path : opts.inputs) {
    const GrayImage img = imaging::read_png_gray(path);
    const bool raw_size = img.rows() == data::kRawRows && img.cols() == data::kRawCols;
    const bool canvas_size = img.rows() == data::kCanvas && img.cols() == data::kCanvas;
    if (!raw_size && !canvas_size) {
      throw InvalidInput(path.string() + ": expected " + std::to_string(data::kRawRows) + "x" +
                         std::to_string(data::kRawCols) + " or " + std::to_string(data::kCanvas) + "x" +
                         std::to_string(data::kCanvas) + " pixels, got " + std::to_string(img.rows()) + "x" +
                         std::to_string(img.cols()));
    }
    const std::vector<FloatImage> batch{data::prepare_image(img)};
    LabelMap labels = nn::segment(gen, batch).front();
    if (raw_size) labels = data::crop_to_raw(labels);
    const auto stem = path.stem().string();
    imaging::write_png(opts.output_dir / (stem + "_labels.png"), labels);
    imaging::write_png(opts.output_dir / (stem + "_color.png"), imaging::colorize(labels));
    log << path.string() << " -> " << (opts.output_dir / (stem + "_color.png")).string() << '\n';
  }
}

void run_diff(const DiffOptions& opts, std::ostream& log) {
  if (opts.indices.empty()) throw InvalidInput("no sample indices given");
  const auto raw = data::load_dataset(opts.dataset, opts.load);
  nn::Generator gen = nn::load_generator(opts.checkpoint);
  fs::create_directories(opts.output_dir);
  for (const auto idx : opts.indices) {
    if (idx >= raw.size()) {
      throw InvalidInput("sample index " + std::to_string(idx) + " out of range (corpus has " +
                         std::to_string(raw.size()) + ")");
    }
    const auto prepared = data::prepare_sample(raw[idx]);
    const std::vector<FloatImage> batch{prepared.image};
    const LabelMap pred = data::crop_to_raw(nn::segment(gen, batch).front());
    const LabelMap& gt = raw[idx].label;
    const auto name = "sample_" + std::to_string(idx);
    imaging::write_png(opts.output_dir / (name + "_diff.png"), imaging::difference_image(pred, gt));
    imaging::write_png(opts.output_dir / (name + "_pred.png"), imaging::colorize(pred));
    imaging::write_png(opts.output_dir / (name + "_truth.png"), imaging::colorize(gt));

    const auto cm = metrics::confusion_matrix(pred, gt, data::kNumClasses);
    std::vector<std::int64_t> wrong_by_pred(data::kNumClasses, 0);
    std::int64_t wrong = 0;
    for (int t = 0; t < data::kNumClasses; ++t)
      for (int p = 0; p < data::kNumClasses; ++p)
        if (t != p) {
          wrong += cm.at(t, p);
          wrong_by_pred[static_cast<std::size_t>(p)] += cm.at(t, p);
        }
    report::write_json(opts.output_dir / (name + "_diff.json"),
                       {{"sample", idx},
                        {"checkpoint", opts.checkpoint.string()},
                        {"rule", "matching pixels black; mismatches drawn in the predicted class colour"},
                        {"palette", {{"0", "black"}, {"1", "red"}, {"2", "green"}, {"3", "blue"}}},
                        {"mismatched_pixels", wrong},
                        {"mismatched_by_predicted_class", wrong_by_pred},
                        {"confusion", report::confusion_to_json(cm)}});
    log << name << ": " << wrong << " mismatched pixels\n";
  }
}

namespace {

std::string csv_cell(const nlohmann::json& v, bool percent) {
  if (!v.is_number()) return "";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << (percent ? 100.0 * v.get<double>() : v.get<double>());
  return os.str();
}

}  // namespace

void run_report(const ReportOptions& opts, std::ostream& log) {
  if (opts.runs.empty()) throw InvalidInput("no runs given");
  if (opts.scope != "all" && opts.scope != "foreground" && opts.scope != "both") {
    throw InvalidInput("scope must be all, foreground or both");
  }
  std::string csv = report::csv_header();
  for (const auto& spec : opts.runs) {
    const auto eq = spec.find('=');
    const std::string name = eq == std::string::npos ? fs::path(spec).filename().string() : spec.substr(0, eq);
    fs::path path = eq == std::string::npos ? fs::path(spec) : fs::path(spec.substr(eq + 1));
    if (fs::is_directory(path)) {
      path = fs::exists(path / "report.json") ? path / "report.json" : path / "eval_test" / "report.json";
    }
    const auto j = report::read_json(path);
    for (const std::string scope : {"all", "foreground"}) {
      if (opts.scope != "both" && opts.scope != scope) continue;
      const auto& agg = j.at(scope == "all" ? "mean_all_classes" : "mean_foreground_classes");
      csv += name + "," + scope;
      for (const auto m : metrics::kAllMetrics) {
        const auto key = metrics::metric_name(m);
        csv += "," + csv_cell(agg.contains(key) ? agg.at(key) : nlohmann::json(), m != metrics::Metric::kHausdorff);
      }
      csv += "\n";
    }
  }
  report::write_text(opts.output, csv);
  log << "wrote " << opts.output.string() << '\n';
}

}  // namespace chromoseg::cli
