// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any required criterion fails. `--only <name>` runs one.

#include <torch/torch.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "chromoseg/architecture.hpp"
#include "chromoseg/cli/commands.hpp"
#include "chromoseg/data.hpp"
#include "chromoseg/loss_reference.hpp"
#include "chromoseg/metrics.hpp"
#include "chromoseg/nn/checkpoint.hpp"
#include "chromoseg/nn/discriminator.hpp"
#include "chromoseg/nn/generator.hpp"
#include "chromoseg/nn/losses.hpp"
#include "chromoseg/nn/train.hpp"
#include "chromoseg/report.hpp"
#include "oracles.hpp"
#include "synthetic_corpus.hpp"

using namespace chromoseg;
namespace fs = std::filesystem;
namespace ref = chromoseg::losses::reference;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Settings {
  fs::path work_dir = fs::temp_directory_path() / "chromoseg_acceptance";
  // Training smoke scale.
  std::size_t smoke_corpus = 1250;  // 80% of this is the 1000-sample training subset
  int smoke_epochs = 30;
  std::array<int, 5> smoke_filters{8, 16, 32, 64, 128};
  std::array<int, 5> smoke_discriminator{16, 32, 64, 128, 1};
  std::size_t smoke_monitor = 200;
  fs::path published_corpus;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

fs::path fresh(const Settings& s, const std::string& name) {
  const auto dir = s.work_dir / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------- Lovasz

std::vector<double> vertex_probs(std::span<const std::uint8_t> pred, int classes) {
  const auto n = pred.size();
  std::vector<double> p(classes * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) p[pred[i] * n + i] = 1.0;
  return p;
}

Outcome lovasz_vertex_oracle(const Settings&) {
  constexpr int kClasses = 4;
  double worst = 0.0;
  std::size_t checked = 0;
  auto check = [&](std::span<const std::uint8_t> gt, std::span<const std::uint8_t> pred) {
    const double got = ref::lovasz_softmax(vertex_probs(pred, kClasses), gt, kClasses).value;
    worst = std::max(worst, std::abs(got - oracle::mean_jaccard_loss(pred, gt, kClasses)));
    ++checked;
  };
  // Exhaustive: all 4^n x 4^n (label, prediction) assignments for n <= 5.
  for (int n = 1; n <= 5; ++n) {
    std::vector<std::uint8_t> gt(n), pred(n);
    const std::uint64_t combos = 1ULL << (4 * n);
    for (std::uint64_t code = 0; code < combos; ++code) {
      std::uint64_t v = code;
      for (int i = 0; i < n; ++i, v >>= 2) gt[i] = static_cast<std::uint8_t>(v & 3);
      for (int i = 0; i < n; ++i, v >>= 2) pred[i] = static_cast<std::uint8_t>(v & 3);
      check(gt, pred);
    }
  }
  const std::size_t exhaustive = checked;
  // Random: 1e5 assignments each for n = 6, 7, 8.
  std::mt19937_64 rng(20240601);
  for (int n = 6; n <= 8; ++n) {
    std::vector<std::uint8_t> gt(n), pred(n);
    for (int t = 0; t < 100000; ++t) {
      for (int i = 0; i < n; ++i) {
        gt[i] = static_cast<std::uint8_t>(rng() & 3);
        pred[i] = static_cast<std::uint8_t>(rng() & 3);
      }
      check(gt, pred);
    }
  }
  // Second route: the batched torch loss on a sample of the same vertices.
  double torch_worst = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const int n = 1 + t % 8;
    std::vector<std::uint8_t> gt(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gt[i] = static_cast<std::uint8_t>(rng() & 3);
      pred[i] = static_cast<std::uint8_t>(rng() & 3);
    }
    const auto probs = torch::tensor(vertex_probs(pred, kClasses), torch::kFloat64).reshape({1, kClasses, 1, n});
    const auto labels = torch::tensor(std::vector<std::int64_t>(gt.begin(), gt.end())).reshape({1, 1, n});
    torch_worst = std::max(torch_worst, std::abs(nn::lovasz_softmax(probs, labels).item<double>() -
                                                 oracle::mean_jaccard_loss(pred, gt, kClasses)));
  }
  const bool pass = worst < 1e-9 && torch_worst < 1e-9;
  return {pass, std::to_string(exhaustive) + " exhaustive + " + std::to_string(checked - exhaustive) +
                    " random vertices, max |diff| " + fmt(worst) + " (torch route " + fmt(torch_worst) +
                    ", tol 1e-9)"};
}

// ---------------------------------------------------------------- gradients

// Random simplex probabilities whose per-class errors are separated by
// more than the finite-difference step, so no sort order flips.
std::vector<double> untied_simplex(std::mt19937_64& rng, int classes, int pixels, double min_gap) {
  std::gamma_distribution<double> g(1.0, 1.0);
  for (;;) {
    std::vector<double> p(static_cast<std::size_t>(classes * pixels));
    for (int i = 0; i < pixels; ++i) {
      double s = 0.0;
      for (int c = 0; c < classes; ++c) s += p[c * pixels + i] = g(rng) + 0.02;
      for (int c = 0; c < classes; ++c) p[c * pixels + i] /= s;
    }
    bool tied = false;
    for (int c = 0; c < classes && !tied; ++c) {
      std::vector<double> v(p.begin() + c * pixels, p.begin() + (c + 1) * pixels);
      // errors are p or 1-p; both orders are separated iff all p and 1-p differ
      for (int i = 0; i < pixels; ++i) v.push_back(1.0 - p[c * pixels + i]);
      std::sort(v.begin(), v.end());
      for (std::size_t k = 1; k < v.size(); ++k) tied |= v[k] - v[k - 1] < min_gap;
    }
    if (!tied) return p;
  }
}

Outcome gradient_checks(const Settings&) {
  constexpr int kClasses = 4;
  constexpr int kPixels = 9;
  constexpr double kStep = 1e-4;
  std::mt19937_64 rng(777);
  const std::vector<double> weights{0.7, 1.3, 0.9, 1.1};
  std::map<std::string, double> worst{{"lovasz", 0.0}, {"ce", 0.0}, {"dice", 0.0}};
  std::map<std::string, double> worst_torch = worst;
  for (int trial = 0; trial < 100; ++trial) {
    const auto probs = untied_simplex(rng, kClasses, kPixels, 4 * kStep);
    std::vector<std::uint8_t> labels(kPixels);
    for (auto& l : labels) l = static_cast<std::uint8_t>(rng() % kClasses);
    const auto torch_labels =
        torch::tensor(std::vector<std::int64_t>(labels.begin(), labels.end())).reshape({1, 3, 3});
    const auto wt = torch::tensor(weights, torch::kFloat64);

    using RefFn = std::function<ref::ValueAndGrad(std::span<const double>)>;
    using TorchFn = std::function<torch::Tensor(const torch::Tensor&)>;
    const std::vector<std::tuple<std::string, RefFn, TorchFn>> fns{
        {"lovasz", [&](std::span<const double> p) { return ref::lovasz_softmax(p, labels, kClasses); },
         [&](const torch::Tensor& p) { return nn::lovasz_softmax(p, torch_labels); }},
        {"ce", [&](std::span<const double> p) { return ref::cross_entropy(p, labels, kClasses, weights); },
         [&](const torch::Tensor& p) { return nn::cross_entropy(p, torch_labels, wt); }},
        {"dice", [&](std::span<const double> p) { return ref::soft_dice_loss(p, labels, kClasses, weights); },
         [&](const torch::Tensor& p) { return nn::soft_dice_loss(p, torch_labels, wt); }}};
    for (const auto& [name, ref_fn, torch_fn] : fns) {
      const auto numeric =
          oracle::finite_difference([&](std::span<const double> p) { return ref_fn(p).value; }, probs, kStep);
      worst[name] = std::max(worst[name], oracle::relative_error(ref_fn(probs).grad, numeric));

      auto tp = torch::tensor(probs, torch::kFloat64).reshape({1, kClasses, 3, 3}).requires_grad_(true);
      torch_fn(tp).backward();
      const auto g = tp.grad().contiguous();
      const std::vector<double> autograd(g.data_ptr<double>(), g.data_ptr<double>() + g.numel());
      worst_torch[name] = std::max(worst_torch[name], oracle::relative_error(autograd, numeric));
    }
  }
  bool pass = true;
  std::string detail = "100 inputs, step 1e-4;";
  for (const auto& [name, v] : worst) {
    pass = pass && v < 1e-3 && worst_torch[name] < 1e-3;
    detail += " " + name + " hand " + fmt(v, 3) + " autograd " + fmt(worst_torch[name], 3) + ";";
  }
  return {pass, detail + " tol 1e-3"};
}

// ---------------------------------------------------------------- metrics

Outcome metric_oracle(const Settings&) {
  constexpr int kClasses = 4;
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  bool identities = true;
  std::size_t nan_mismatch = 0;
  auto compare = [&](double lib, bool defined, double brute) {
    if (std::isnan(brute)) {
      nan_mismatch += defined;
      return;
    }
    if (!defined) {
      ++nan_mismatch;
      return;
    }
    worst = std::max(worst, std::abs(lib - brute));
  };
  for (int t = 0; t < 1000; ++t) {
    LabelMap gt(8, 8), pred(8, 8);
    // Vary class balance so absent and single-pixel classes occur.
    std::discrete_distribution<int> dist{{1.0 + t % 7, 1.0 + (t / 7) % 3, 0.3 + t % 2, 0.2}};
    for (auto& v : gt.values()) v = static_cast<std::uint8_t>(dist(rng));
    for (auto& v : pred.values()) v = static_cast<std::uint8_t>(rng() % 5 == 0 ? dist(rng) : 0);
    if (t % 3 == 0)
      for (std::size_t i = 0; i < gt.size(); ++i)
        if (rng() % 4) pred.values()[i] = gt.values()[i];

    const auto lib = metrics::evaluate_sample(pred, gt, kClasses);
    const auto brute = oracle::brute_metrics(pred, gt, kClasses);
    worst = std::max(worst, std::abs(lib.accuracy - brute.accuracy));
    for (int c = 0; c < kClasses; ++c) {
      const auto& m = lib.classes[static_cast<std::size_t>(c)];
      compare(m.dice.value, m.dice.defined, brute.dice[c]);
      compare(m.iou.value, m.iou.defined, brute.iou[c]);
      compare(m.precision.value, m.precision.defined, brute.precision[c]);
      compare(m.recall.value, m.recall.defined, brute.recall[c]);
      compare(m.fnr.value, m.fnr.defined, brute.fnr[c]);
      compare(m.fpr.value, m.fpr.defined, brute.fpr[c]);
      const auto& h = lib.hausdorff[static_cast<std::size_t>(c)];
      compare(h.value, h.defined, brute.hausdorff[c]);

      // Identities up to the rounding of one division.
      const auto tp = lib.confusion.true_positives(c);
      const auto fp = lib.confusion.false_positives(c);
      const auto fn = lib.confusion.false_negatives(c);
      if (tp + fp + fn > 0) {
        const double iou = m.iou.value;
        identities = identities && std::abs(m.dice.value - 2.0 * iou / (1.0 + iou)) <= 4e-16;
      }
      if (tp + fn > 0) identities = identities && std::abs(m.recall.value + m.fnr.value - 1.0) <= 2.3e-16;
    }
  }
  const bool pass = worst < 1e-12 && nan_mismatch == 0 && identities;
  return {pass, "1000 random 8x8 pairs, max |diff| " + fmt(worst) + ", definedness mismatches " +
                    std::to_string(nan_mismatch) + ", Dice-IoU and Recall+FNR identities " +
                    (identities ? "hold" : "violated")};
}

// ---------------------------------------------------------------- architecture

Outcome architecture_checks(const Settings&) {
  const GeneratorConfig cfg;
  std::string problems;
  // Closed form, written out independently of the library.
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; i + j < 5; ++j) {
      const int f_i = cfg.filters[static_cast<std::size_t>(i)];
      const int in = (i == 0 && j == 0) ? 1
                     : j == 0           ? cfg.filters[static_cast<std::size_t>(i - 1)]
                                        : f_i * j + cfg.filters[static_cast<std::size_t>(i + 1)];
      const auto p = channel_plan(i, j, cfg);
      if (p.in_channels != in || p.mid_channels != f_i || p.out_channels != f_i) {
        problems += " plan(" + std::to_string(i) + "," + std::to_string(j) + ")";
      }
    }
  }
  const auto plans = node_plans(cfg);

  torch::manual_seed(123);
  nn::Generator g(cfg);
  const auto params = nn::count_trainable_parameters(*g);
  const auto analytic = generator_parameter_count(cfg);
  double max_dev = 0.0;
  std::vector<std::int64_t> shape;
  {
    g->eval();
    torch::NoGradGuard ng;
    const auto probs = g->forward(torch::rand({1, 1, 128, 128}));
    shape = probs.sizes().vec();
    max_dev = (probs.sum(1) - 1.0).abs().max().item<double>();
  }
  nn::Discriminator d;
  std::vector<std::int64_t> d_shape;
  {
    torch::NoGradGuard ng;
    d_shape = d->forward(torch::rand({1, 5, 128, 128})).sizes().vec();
  }
  const double rel = std::abs(static_cast<double>(params) / 36.63e6 - 1.0);
  const bool pass = problems.empty() && plans.size() == 15 && shape == std::vector<std::int64_t>{1, 4, 128, 128} &&
                    max_dev <= 1e-5 && rel <= 0.02 && params == analytic &&
                    d_shape == std::vector<std::int64_t>{1, 1, 10, 10};
  std::ostringstream os;
  os << plans.size() << " node plans" << (problems.empty() ? " match" : " mismatch:" + problems)
     << "; G output " << shape[1] << "x" << shape[2] << "x" << shape[3] << ", max |sum-1| " << fmt(max_dev, 3)
     << "; G params " << params << " (analytic " << analytic << ", " << fmt(100.0 * rel, 3)
     << "% from 36.63M); D output " << d_shape[1] << "x" << d_shape[2] << "x" << d_shape[3];
  return {pass, os.str()};
}

// ---------------------------------------------------------------- training

struct SmokeData {
  std::vector<data::RawSample> raw;
  std::vector<data::PreparedSample> corpus;
  data::DatasetSplit split;
};

SmokeData smoke_data(std::size_t n) {
  SmokeData d;
  synthetic::SyntheticOptions opts;
  opts.samples = n;
  opts.seed = 123;
  d.raw = synthetic::synthetic_corpus(opts);
  for (const auto& s : d.raw) d.corpus.push_back(data::prepare_sample(s));
  d.split = data::split_dataset(n, 0.8, 123);
  std::vector<LabelMap> labels;
  for (const auto& s : d.raw) labels.push_back(s.label);
  d.split.overlap_test_indices = data::filter_overlap(d.split, labels);
  return d;
}

Outcome training_smoke(const Settings& s) {
  const auto data = smoke_data(s.smoke_corpus);
  nn::TrainConfig cfg;  // defaults: Lovasz, lambda 10, GAN on, batch 64, Adam(2e-4, 0.5, 0.999)
  cfg.generator.filters = s.smoke_filters;
  cfg.discriminator.channels = s.smoke_discriminator;
  cfg.max_epochs = s.smoke_epochs;
  cfg.monitor_subset = s.smoke_monitor;
  cfg.output_dir = fresh(s, "smoke");
  const auto start = std::chrono::steady_clock::now();
  const auto out = nn::fit(data.corpus, data.split, cfg, [](const nn::EpochRecord& r, nn::Trainer&) {
    std::cerr << "  epoch " << r.epoch << " g_seg " << r.losses.g_seg << " g_adv " << r.losses.g_adv << " d "
              << r.losses.d_loss << " train fg Dice " << r.train_dice << '\n';
  });
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;

  auto best = nn::load_generator(out.best_checkpoint);
  const auto rep = nn::evaluate(best, data.corpus, data.split.overlap_test_indices, false);
  const double dice = rep.mean(metrics::Metric::kDice, metrics::ClassScope::kForeground);

  bool decreasing = out.state.history.size() >= 5;
  std::string seg_trace;
  for (std::size_t e = 0; e < std::min<std::size_t>(5, out.state.history.size()); ++e) {
    const double v = out.state.history[e].losses.g_seg;
    if (e > 0) decreasing = decreasing && v < out.state.history[e - 1].losses.g_seg;
    seg_trace += (e ? "," : "") + fmt(v, 4);
  }
  const bool pass = dice >= 0.90 && decreasing;
  std::ostringstream os;
  os << data.split.train_indices.size() << " train / " << data.split.overlap_test_indices.size()
     << " overlap-test synthetic samples, filters " << s.smoke_filters[0] << ".." << s.smoke_filters[4] << ", "
     << out.state.epoch << " epochs (best " << out.state.best_epoch << "), overlap-test fg Dice " << fmt(dice, 4)
     << " (target 0.90); epoch-mean g_seg first 5 [" << seg_trace << "] "
     << (decreasing ? "strictly decreasing" : "NOT strictly decreasing") << "; " << fmt(minutes, 3) << " min";
  return {pass, os.str()};
}

cli::RunConfig tiny_run(const fs::path& dataset, const fs::path& out) {
  cli::RunConfig cfg;
  cfg.dataset = dataset;
  cfg.output_dir = out;
  cfg.train.generator.filters = {4, 8, 16, 32, 64};
  cfg.train.discriminator.channels = {16, 32, 64, 128, 1};
  cfg.train.batch_size = 8;
  cfg.train.max_epochs = 2;
  return cfg;
}

fs::path tiny_dataset(const Settings& s, const std::string& name, std::size_t n) {
  const auto dir = fresh(s, name);
  synthetic::SyntheticOptions opts;
  opts.samples = n;
  opts.seed = 99;
  data::save_canonical(dir / "corpus.h5", synthetic::synthetic_corpus(opts));
  return dir / "corpus.h5";
}

Outcome ablation_harness(const Settings& s) {
  const auto dataset = tiny_dataset(s, "ablation", 20);
  std::ostringstream log;
  cli::ReportOptions table;
  std::size_t complete = 0;
  std::string failures;
  for (const auto kind : losses::kAllLossKinds) {
    for (const bool gan : {false, true}) {
      const auto name = losses::to_string(kind) + (gan ? "_gan" : "_nogan");
      auto cfg = tiny_run(dataset, s.work_dir / "ablation" / name);
      cfg.train.loss.kind = kind;
      cfg.train.gan_enabled = gan;
      try {
        cli::run_train(cfg, log);
        const auto rep = report::read_json(cfg.output_dir / "eval_test" / "report.json");
        if (!rep.at("mean_all_classes").at("Dice").is_number()) throw Error("no Dice in report");
        table.runs.push_back(name + "=" + (cfg.output_dir / "eval_test" / "report.json").string());
        ++complete;
      } catch (const std::exception& e) {
        failures += " " + name + ": " + e.what();
      }
    }
  }
  table.scope = "both";
  table.output = s.work_dir / "ablation" / "table.csv";
  std::size_t rows = 0;
  if (!table.runs.empty()) {
    cli::run_report(table, log);
    std::ifstream in(table.output);
    std::string line;
    while (std::getline(in, line)) ++rows;
  }
  const bool pass = complete == 10 && rows == 21;
  return {pass, std::to_string(complete) + "/10 arms (5 losses x GAN on/off) trained and evaluated; table " +
                    table.output.string() + " has " + std::to_string(rows ? rows - 1 : 0) + " rows" + failures};
}

Outcome determinism(const Settings& s) {
  const auto dataset = tiny_dataset(s, "determinism", 20);
  std::ostringstream log;
  std::vector<fs::path> runs;
  for (const auto* name : {"run_a", "run_b"}) {
    auto cfg = tiny_run(dataset, s.work_dir / "determinism" / name);
    cli::run_train(cfg, log);
    runs.push_back(cfg.output_dir);
  }
  const auto ma = report::read_json(runs[0] / "run_manifest.json");
  const auto mb = report::read_json(runs[1] / "run_manifest.json");
  const bool same_split = ma.at("split") == mb.at("split");
  const bool same_history = ma.at("training").at("loss_history") == mb.at("training").at("loss_history");
  bool same_ckpt = true;
  for (const auto* f : {"checkpoints/best.bin", "checkpoints/last.bin"}) {
    same_ckpt = same_ckpt && read_bytes(runs[0] / f) == read_bytes(runs[1] / f) && !read_bytes(runs[0] / f).empty();
  }
  const bool pass = same_split && same_history && same_ckpt;
  return {pass, std::string("split manifests ") + (same_split ? "identical" : "differ") + ", loss histories " +
                    (same_history ? "identical" : "differ") + ", checkpoints " +
                    (same_ckpt ? "byte-identical" : "differ")};
}

Outcome full_corpus_run(const Settings& s) {
  if (s.published_corpus.empty() || !fs::exists(s.published_corpus)) {
    return {false, "not run: needs the published corpus (--published-corpus <file.h5>) and GPU-scale compute"};
  }
  cli::RunConfig cfg;
  cfg.dataset = s.published_corpus;
  cfg.load.layout = data::Layout::kPublished;
  cfg.output_dir = fresh(s, "full");
  cli::run_train(cfg, std::cerr);
  const auto rep = report::read_json(cfg.output_dir / "eval_overlap_test" / "report.json").at("mean_all_classes");
  const double dice = rep.at("Dice").get<double>() * 100.0;
  const double iou = rep.at("IoU").get<double>() * 100.0;
  const double acc = rep.at("Acc").get<double>() * 100.0;
  const bool pass = std::abs(dice - 98.60) <= 1.0 && std::abs(iou - 97.60) <= 1.0 && std::abs(acc - 99.98) <= 1.0;
  return {pass, "Dice " + fmt(dice, 5) + " IoU " + fmt(iou, 5) + " Acc " + fmt(acc, 5) +
                    " vs 98.60 / 97.60 / 99.98 (+-1 point)"};
}

struct Criterion {
  std::string name;
  std::string title;
  bool required;
  std::function<Outcome(const Settings&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  Settings settings;
  std::string only;
  CLI::App app{"acceptance checks"};
  app.add_option("--only", only, "run a single criterion");
  app.add_option("--work-dir", settings.work_dir);
  app.add_option("--smoke-corpus", settings.smoke_corpus, "synthetic samples for the training smoke");
  app.add_option("--smoke-epochs", settings.smoke_epochs);
  app.add_option("--smoke-monitor", settings.smoke_monitor);
  app.add_option("--published-corpus", settings.published_corpus, "enables the extended full-corpus run");
  CLI11_PARSE(app, argc, argv);

  torch::set_num_threads(1);
  const std::vector<Criterion> criteria{
      {"lovasz_vertex", "Lovasz vertex oracle", true, lovasz_vertex_oracle},
      {"gradients", "Gradient checks", true, gradient_checks},
      {"metric_oracle", "Metric oracle", true, metric_oracle},
      {"architecture", "Architecture checks", true, architecture_checks},
      {"training_smoke", "Training smoke", true, training_smoke},
      {"ablation", "Ablation harness", true, ablation_harness},
      {"determinism", "Determinism", true, determinism},
      {"full_corpus", "Full-corpus run (extended, optional)", false, full_corpus_run},
  };

  bool ok = true;
  bool matched = false;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.name) continue;
    matched = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(settings);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.title << ": " << o.detail << " [" << fmt(secs, 3)
              << " s]" << std::endl;
    if (c.required) ok = ok && o.pass;
  }
  if (!matched) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return ok ? 0 : 1;
}
