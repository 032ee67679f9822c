#include <CLI11.hpp>

#include <iostream>

#include "chromoseg/cli/commands.hpp"
#include "chromoseg/config_json.hpp"
#include "chromoseg/error.hpp"
#include "chromoseg/nn/train.hpp"

using namespace chromoseg;

namespace {

void add_dataset_options(CLI::App* cmd, std::filesystem::path& dataset, std::string& layout,
                         std::string& published_array) {
  cmd->add_option("--dataset", dataset, "HDF5 corpus")->required();
  cmd->add_option("--layout", layout, "canonical | published")->capture_default_str();
  cmd->add_option("--published-array", published_array, "array name inside a published container");
}

data::LoadOptions load_options(const std::string& layout, const std::string& published_array) {
  data::LoadOptions o;
  o.layout = data::parse_layout(layout);
  o.published_array = published_array;
  return o;
}

bool parse_on_off(const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw InvalidInput("expected on or off, got '" + v + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmentation of overlapping chromosome pairs"};
  app.require_subcommand(1);

  // prepare
  cli::PrepareOptions prep;
  std::string prep_layout = "canonical";
  auto* prepare = app.add_subcommand("prepare", "validate a corpus and write split.json (+ canonical corpus.h5)");
  add_dataset_options(prepare, prep.dataset, prep_layout, prep.load.published_array);
  prepare->add_option("--split-ratio", prep.split_ratio)->capture_default_str();
  prepare->add_option("--split-seed", prep.split_seed)->capture_default_str();
  prepare->add_option("--out", prep.output_dir)->capture_default_str();
  bool no_corpus = false;
  prepare->add_flag("--no-corpus", no_corpus, "skip writing corpus.h5");

  // train
  std::filesystem::path config_path;
  std::filesystem::path train_dataset;
  std::string train_layout;
  std::string train_array;
  std::filesystem::path split_path, train_out;
  std::uint64_t split_seed = 0, seed = 0;
  double split_ratio = 0, lambda = -1, lr = 0;
  std::size_t batch = 0, train_subset = 0, test_subset = 0, monitor_subset = 0;
  int max_epochs = -1, patience = 0;
  std::string loss, gan, filters, upsample;
  bool resume = false;
  auto* train = app.add_subcommand("train", "train a generator (optionally adversarially)");
  train->add_option("--config", config_path, "JSON config or an earlier run_manifest.json");
  train->add_option("--dataset", train_dataset, "HDF5 corpus");
  train->add_option("--layout", train_layout, "canonical | published");
  train->add_option("--published-array", train_array);
  train->add_option("--split", split_path, "split.json from prepare");
  train->add_option("--split-ratio", split_ratio, "default 0.8");
  train->add_option("--split-seed", split_seed, "default 123");
  train->add_option("--seed", seed, "weight-init and batch-order seed, default 123");
  train->add_option("--batch", batch, "default 64");
  train->add_option("--loss", loss, "lovasz | ce | weighted_ce | dice | weighted_dice");
  train->add_option("--lambda", lambda, "segmentation-loss weight, default 10");
  train->add_option("--lr", lr, "Adam learning rate for both networks, default 2e-4");
  train->add_option("--gan", gan, "on | off");
  train->add_option("--max-epochs", max_epochs, "0: until early stop");
  train->add_option("--patience", patience, "early-stop window, default 15");
  train->add_option("--generator-filters", filters, "five comma-separated widths, default 64,128,256,512,1024");
  train->add_option("--upsample", upsample, "bilinear | transposed");
  train->add_option("--train-subset", train_subset, "use the first N training samples");
  train->add_option("--test-subset", test_subset, "evaluate on the first N test samples");
  train->add_option("--monitor-subset", monitor_subset, "training samples scored each epoch");
  train->add_option("--out", train_out, "run directory");
  train->add_flag("--resume", resume, "continue from the run directory's last checkpoint");

  // evaluate
  cli::EvaluateOptions ev;
  std::string ev_layout = "canonical", ev_subset = "test";
  bool no_hausdorff = false;
  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a split subset");
  evaluate->add_option("--checkpoint", ev.checkpoint)->required();
  add_dataset_options(evaluate, ev.dataset, ev_layout, ev.load.published_array);
  evaluate->add_option("--split", ev.split, "split.json or run_manifest.json");
  evaluate->add_option("--split-ratio", ev.split_ratio)->capture_default_str();
  evaluate->add_option("--split-seed", ev.split_seed)->capture_default_str();
  evaluate->add_option("--subset", ev_subset, "test | overlap | train")->capture_default_str();
  evaluate->add_option("--limit", ev.limit, "first N samples of the subset");
  evaluate->add_flag("--no-hausdorff", no_hausdorff);
  evaluate->add_option("--out", ev.output_dir)->capture_default_str();

  // segment
  cli::SegmentOptions seg;
  auto* segment = app.add_subcommand("segment", "segment gray PNG images");
  segment->add_option("--checkpoint", seg.checkpoint)->required();
  segment->add_option("inputs", seg.inputs, "94x93 or 128x128 gray PNGs")->required();
  segment->add_option("--out", seg.output_dir)->capture_default_str();

  // diff
  cli::DiffOptions df;
  std::string df_layout = "canonical";
  auto* diff = app.add_subcommand("diff", "difference images for corpus samples");
  diff->add_option("--checkpoint", df.checkpoint)->required();
  add_dataset_options(diff, df.dataset, df_layout, df.load.published_array);
  diff->add_option("--index", df.indices, "sample index (repeatable)")->required();
  diff->add_option("--out", df.output_dir)->capture_default_str();

  // report
  cli::ReportOptions rep;
  auto* report = app.add_subcommand("report", "collect run reports into one CSV table");
  report->add_option("runs", rep.runs, "name=path entries (report.json or run directory)")->required();
  report->add_option("--scope", rep.scope, "all | foreground | both")->capture_default_str();
  report->add_option("--out", rep.output)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prepare) {
      prep.load.layout = data::parse_layout(prep_layout);
      prep.write_corpus = !no_corpus;
      cli::run_prepare(prep, std::cout);
    } else if (*train) {
      cli::RunConfig cfg = config_path.empty() ? cli::RunConfig{} : cli::load_run_config(config_path);
      if (!train_dataset.empty()) cfg.dataset = train_dataset;
      if (!train_layout.empty()) cfg.load.layout = data::parse_layout(train_layout);
      if (!train_array.empty()) cfg.load.published_array = train_array;
      if (!split_path.empty()) cfg.split_manifest = split_path;
      if (split_ratio > 0) cfg.split_ratio = split_ratio;
      if (train->count("--split-seed")) cfg.split_seed = split_seed;
      if (train->count("--seed")) cfg.train.seed = seed;
      if (batch > 0) cfg.train.batch_size = batch;
      if (!loss.empty()) cfg.train.loss.kind = losses::parse_loss_kind(loss);
      if (train->count("--lambda")) cfg.train.loss.lambda = lambda;
      if (lr > 0) {
        cfg.train.generator_optimizer.learning_rate = lr;
        cfg.train.discriminator_optimizer.learning_rate = lr;
      }
      if (!gan.empty()) cfg.train.gan_enabled = parse_on_off(gan);
      if (max_epochs >= 0) cfg.train.max_epochs = max_epochs;
      if (patience > 0) cfg.train.early_stop_window = patience;
      if (!filters.empty()) cfg.train.generator.filters = cli::parse_filters(filters);
      if (!upsample.empty()) cfg.train.generator.upsample = parse_upsample_mode(upsample);
      if (train_subset > 0) cfg.train_subset = train_subset;
      if (test_subset > 0) cfg.test_subset = test_subset;
      if (monitor_subset > 0) cfg.train.monitor_subset = monitor_subset;
      if (!train_out.empty()) cfg.output_dir = train_out;
      cfg.train.resume = resume;
      cli::run_train(cfg, std::cout);
    } else if (*evaluate) {
      ev.load.layout = data::parse_layout(ev_layout);
      ev.subset = cli::parse_eval_subset(ev_subset);
      ev.hausdorff = !no_hausdorff;
      cli::run_evaluate(ev, std::cout);
    } else if (*segment) {
      cli::run_segment(seg, std::cout);
    } else if (*diff) {
      df.load.layout = data::parse_layout(df_layout);
      cli::run_diff(df, std::cout);
    } else if (*report) {
      cli::run_report(rep, std::cout);
    }
  } catch (const nn::NonFiniteLoss& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitNonFinite;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitFailure;
  }
  return cli::kExitOk;
}
