#include "chromoseg/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chromoseg/config_json.hpp"
#include "chromoseg/nn/checkpoint.hpp"
#include "chromoseg/report.hpp"

namespace chromoseg::nn {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < beta2 && beta2 < 1.0)) throw InvalidInput("need 0 <= beta1 < beta2 < 1");
}

void TrainConfig::validate() const {
  generator.validate();
  loss.validate();
  generator_optimizer.validate();
  discriminator_optimizer.validate();
  if (batch_size == 0) throw InvalidInput("batch size must be at least 1");
  if (early_stop_window < 1) throw InvalidInput("early-stop window must be at least 1");
  if (max_epochs < 0) throw InvalidInput("max epochs must be >= 0");
  if (discriminator.in_channels != generator.in_channels + generator.classes) {
    throw InvalidInput("discriminator input channels must equal image channels plus classes");
  }
}

void to_json(nlohmann::json& j, const OptimizerConfig& cfg) {
  j = {{"algorithm", "adam"}, {"learning_rate", cfg.learning_rate}, {"beta1", cfg.beta1}, {"beta2", cfg.beta2}};
}

void from_json(const nlohmann::json& j, OptimizerConfig& cfg) {
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.beta1 = j.value("beta1", cfg.beta1);
  cfg.beta2 = j.value("beta2", cfg.beta2);
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  j = {{"generator", cfg.generator},
       {"discriminator", cfg.discriminator},
       {"loss", cfg.loss},
       {"generator_optimizer", cfg.generator_optimizer},
       {"discriminator_optimizer", cfg.discriminator_optimizer},
       {"gan_enabled", cfg.gan_enabled},
       {"batch_size", cfg.batch_size},
       {"seed", cfg.seed},
       {"early_stop_window", cfg.early_stop_window},
       {"max_epochs", cfg.max_epochs},
       {"monitor_subset", cfg.monitor_subset},
       {"auto_class_weights", cfg.auto_class_weights}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  if (j.contains("generator")) j.at("generator").get_to(cfg.generator);
  if (j.contains("discriminator")) j.at("discriminator").get_to(cfg.discriminator);
  if (j.contains("loss")) j.at("loss").get_to(cfg.loss);
  if (j.contains("generator_optimizer")) j.at("generator_optimizer").get_to(cfg.generator_optimizer);
  if (j.contains("discriminator_optimizer")) j.at("discriminator_optimizer").get_to(cfg.discriminator_optimizer);
  cfg.gan_enabled = j.value("gan_enabled", cfg.gan_enabled);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.early_stop_window = j.value("early_stop_window", cfg.early_stop_window);
  cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
  cfg.monitor_subset = j.value("monitor_subset", cfg.monitor_subset);
  cfg.auto_class_weights = j.value("auto_class_weights", cfg.auto_class_weights);
}

void to_json(nlohmann::json& j, const TrainState& s) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : s.history) {
    history.push_back({{"epoch", e.epoch},
                       {"g_total", e.losses.g_total},
                       {"g_adv", e.losses.g_adv},
                       {"g_seg", e.losses.g_seg},
                       {"d_loss", e.losses.d_loss},
                       {"train_dice", e.train_dice},
                       {"checkpointed", e.checkpointed}});
  }
  j = {{"epoch", s.epoch},
       {"best_train_dice", s.best_train_dice},
       {"best_epoch", s.best_epoch},
       {"epochs_without_improvement", s.epochs_without_improvement},
       {"best_loss", std::isfinite(s.best_loss) ? nlohmann::json(s.best_loss) : nlohmann::json(nullptr)},
       {"rng_seed", s.rng_seed},
       {"stopped_early", s.stopped_early},
       {"loss_history", history}};
}

void from_json(const nlohmann::json& j, TrainState& s) {
  s.epoch = j.at("epoch").get<int>();
  s.best_train_dice = j.at("best_train_dice").get<double>();
  s.best_epoch = j.at("best_epoch").get<int>();
  s.epochs_without_improvement = j.at("epochs_without_improvement").get<int>();
  s.best_loss = j.at("best_loss").is_null() ? std::numeric_limits<double>::infinity()
                                            : j.at("best_loss").get<double>();
  s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  s.stopped_early = j.at("stopped_early").get<bool>();
  s.history.clear();
  for (const auto& e : j.at("loss_history")) {
    EpochRecord r;
    r.epoch = e.at("epoch").get<int>();
    r.losses = {e.at("g_total").get<double>(), e.at("g_adv").get<double>(), e.at("g_seg").get<double>(),
                e.at("d_loss").get<double>()};
    r.train_dice = e.at("train_dice").get<double>();
    r.checkpointed = e.at("checkpointed").get<bool>();
    s.history.push_back(r);
  }
}

EarlyStopping::EarlyStopping(int window, double best, int stale) : window_(window), best_(best), stale_(stale) {}

bool EarlyStopping::observe(double loss) {
  if (loss < best_) {
    best_ = loss;
    stale_ = 0;
  } else {
    ++stale_;
  }
  return stale_ >= window_;
}

namespace {

std::string describe(const std::vector<std::size_t>& indices) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < indices.size(); ++i) os << (i ? "," : "") << indices[i];
  os << ']';
  return os.str();
}

}  // namespace

NonFiniteLoss::NonFiniteLoss(const std::string& what, std::vector<std::size_t> batch_indices)
    : Error(what + " is not finite; batch sample indices " + describe(batch_indices)),
      indices_(std::move(batch_indices)) {}

torch::Tensor images_to_tensor(std::span<const FloatImage> images) {
  if (images.empty()) return torch::empty({0, 1, 0, 0});
  const int rows = images.front().rows();
  const int cols = images.front().cols();
  auto out = torch::empty({static_cast<std::int64_t>(images.size()), 1, rows, cols}, torch::kFloat32);
  float* dst = out.data_ptr<float>();
  for (const auto& img : images) {
    if (img.rows() != rows || img.cols() != cols) throw InvalidInput("images in a batch must share a size");
    dst = std::copy(img.values().begin(), img.values().end(), dst);
  }
  return out;
}

std::vector<LabelMap> tensor_to_labels(const torch::Tensor& labels) {
  const auto cpu = labels.to(torch::kCPU).to(torch::kUInt8).contiguous();
  const auto rows = static_cast<int>(cpu.size(1));
  const auto cols = static_cast<int>(cpu.size(2));
  std::vector<LabelMap> out;
  const std::uint8_t* src = cpu.data_ptr<std::uint8_t>();
  for (std::int64_t b = 0; b < cpu.size(0); ++b) {
    LabelMap m(rows, cols);
    std::copy_n(src, m.size(), m.values().begin());
    src += m.size();
    out.push_back(std::move(m));
  }
  return out;
}

Batch make_batch(std::span<const data::PreparedSample> corpus, std::span<const std::size_t> indices, int classes) {
  if (indices.empty()) throw InvalidInput("empty batch");
  std::vector<FloatImage> images;
  const int rows = corpus[indices.front()].label.rows();
  const int cols = corpus[indices.front()].label.cols();
  auto labels = torch::empty({static_cast<std::int64_t>(indices.size()), rows, cols}, torch::kInt64);
  auto* dst = labels.data_ptr<std::int64_t>();
  for (const auto idx : indices) {
    if (idx >= corpus.size()) throw InvalidInput("batch index beyond corpus");
    images.push_back(corpus[idx].image);
    dst = std::copy(corpus[idx].label.values().begin(), corpus[idx].label.values().end(), dst);
  }
  Batch b;
  b.images = images_to_tensor(images);
  b.labels = labels;
  b.one_hot = torch::one_hot(labels, classes).permute({0, 3, 1, 2}).to(torch::kFloat32).contiguous();
  b.indices.assign(indices.begin(), indices.end());
  return b;
}

Trainer::Trainer(TrainConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  torch::manual_seed(cfg_.seed);
  generator_ = Generator(cfg_.generator);
  discriminator_ = Discriminator(cfg_.discriminator);
  const auto adam = [](const OptimizerConfig& o) {
    return torch::optim::AdamOptions(o.learning_rate).betas({o.beta1, o.beta2});
  };
  g_opt_ = std::make_unique<torch::optim::Adam>(generator_->parameters(), adam(cfg_.generator_optimizer));
  d_opt_ = std::make_unique<torch::optim::Adam>(discriminator_->parameters(), adam(cfg_.discriminator_optimizer));
}

void Trainer::set_class_weights(const std::array<double, 4>& weights) {
  cfg_.loss.class_weights = weights;
  cfg_.loss.validate();
}

double Trainer::update_discriminator(const Batch& batch, const torch::Tensor& probs) {
  discriminator_->train();
  d_opt_->zero_grad();
  const auto real = discriminator_->score(batch.images, batch.one_hot);
  const auto fake = discriminator_->score(batch.images, probs.detach());
  const auto loss = lsgan_discriminator_loss(real, fake);
  const double value = loss.item<double>();
  if (!std::isfinite(value)) throw NonFiniteLoss("discriminator loss", batch.indices);
  loss.backward();
  d_opt_->step();
  return value;
}

GeneratorLoss Trainer::update_generator(const Batch& batch, const torch::Tensor& probs) {
  g_opt_->zero_grad();
  torch::Tensor fake_scores;
  if (cfg_.gan_enabled) {
    for (auto& p : discriminator_->parameters()) p.set_requires_grad(false);
    fake_scores = discriminator_->score(batch.images, probs);
  }
  auto loss = generator_objective(fake_scores, probs, batch.labels, cfg_.loss);
  const bool finite = std::isfinite(loss.total.item<double>());
  if (finite) loss.total.backward();
  if (cfg_.gan_enabled) {
    for (auto& p : discriminator_->parameters()) p.set_requires_grad(true);
  }
  if (!finite) throw NonFiniteLoss("generator loss", batch.indices);
  g_opt_->step();
  return loss;
}

StepLosses Trainer::train_step(const Batch& batch) {
  generator_->train();
  const auto probs = generator_->forward(batch.images);
  StepLosses out;
  if (cfg_.gan_enabled) out.d_loss = update_discriminator(batch, probs);
  const auto g = update_generator(batch, probs);
  out.g_total = g.total.item<double>();
  out.g_adv = g.adversarial.item<double>();
  out.g_seg = g.segmentation.item<double>();
  return out;
}

metrics::MetricsReport evaluate(const Predictor& predict, std::span<const data::PreparedSample> corpus,
                                std::span<const std::size_t> indices, bool with_hausdorff,
                                std::size_t batch_size) {
  if (indices.empty()) throw InvalidInput("cannot evaluate an empty sample set");
  std::vector<metrics::SampleMetrics> per_sample;
  per_sample.reserve(indices.size());
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const auto chunk = indices.subspan(start, std::min(batch_size, indices.size() - start));
    const auto batch = make_batch(corpus, chunk);
    const auto preds = tensor_to_labels(argmax_labels(predict(batch.images)));
    for (std::size_t k = 0; k < chunk.size(); ++k) {
      per_sample.push_back(metrics::evaluate_sample(preds[k], corpus[chunk[k]].label, data::kNumClasses,
                                                    with_hausdorff));
    }
  }
  return metrics::aggregate_report(per_sample);
}

namespace {

class InferenceMode {
 public:
  explicit InferenceMode(Generator& g) : g_(g), was_training_(g->is_training()) { g_->eval(); }
  ~InferenceMode() { g_->train(was_training_); }
  InferenceMode(const InferenceMode&) = delete;
  InferenceMode& operator=(const InferenceMode&) = delete;

 private:
  Generator& g_;
  bool was_training_;
  torch::NoGradGuard no_grad_;
};

}  // namespace

metrics::MetricsReport evaluate(Generator& generator, std::span<const data::PreparedSample> corpus,
                                std::span<const std::size_t> indices, bool with_hausdorff,
                                std::size_t batch_size) {
  InferenceMode mode(generator);
  return evaluate([&](const torch::Tensor& x) { return generator->forward(x); }, corpus, indices, with_hausdorff,
                  batch_size);
}

std::vector<LabelMap> segment(Generator& generator, std::span<const FloatImage> images, std::size_t batch_size) {
  InferenceMode mode(generator);
  std::vector<LabelMap> out;
  for (std::size_t start = 0; start < images.size(); start += batch_size) {
    const auto chunk = images.subspan(start, std::min(batch_size, images.size() - start));
    auto maps = tensor_to_labels(argmax_labels(generator->forward(images_to_tensor(chunk))));
    std::move(maps.begin(), maps.end(), std::back_inserter(out));
  }
  return out;
}

namespace {

struct RunFiles {
  std::filesystem::path best;
  std::filesystem::path last;
  std::filesystem::path g_optim;
  std::filesystem::path d_optim;
  std::filesystem::path state;

  explicit RunFiles(const std::filesystem::path& dir)
      : best(dir / "checkpoints" / "best.json"),
        last(dir / "checkpoints" / "last.json"),
        g_optim(dir / "checkpoints" / "last_generator_optimizer.pt"),
        d_optim(dir / "checkpoints" / "last_discriminator_optimizer.pt"),
        state(dir / "train_state.json") {}
};

}  // namespace

FitOutputs fit(std::span<const data::PreparedSample> corpus, const data::DatasetSplit& split, TrainConfig cfg,
               const EpochCallback& on_epoch) {
  if (split.train_indices.empty()) throw InvalidInput("training split is empty");
  const bool weighted = cfg.loss.kind == losses::LossKind::kWeightedCrossEntropy ||
                        cfg.loss.kind == losses::LossKind::kWeightedDice;
  if (weighted && cfg.auto_class_weights) {
    std::vector<LabelMap> labels;
    for (const auto idx : split.train_indices) labels.push_back(corpus[idx].label);
    cfg.loss.class_weights = data::inverse_frequency_weights(labels);
  }

  Trainer trainer(cfg);
  FitOutputs outputs;
  outputs.resolved = cfg;
  TrainState& state = outputs.state;
  state.rng_seed = cfg.seed;
  const bool persist = !cfg.output_dir.empty();
  const RunFiles files(persist ? cfg.output_dir : std::filesystem::path("."));
  if (persist) {
    outputs.best_checkpoint = files.best;
    outputs.last_checkpoint = files.last;
  }

  if (persist && cfg.resume && std::filesystem::exists(files.state) && std::filesystem::exists(files.last)) {
    report::read_json(files.state).get_to(state);
    Discriminator& d = trainer.discriminator();
    load_into(files.last, trainer.generator(), &d);
    torch::load(trainer.generator_optimizer(), files.g_optim.string());
    torch::load(trainer.discriminator_optimizer(), files.d_optim.string());
  }

  std::vector<std::size_t> monitor = split.train_indices;
  if (cfg.monitor_subset > 0 && cfg.monitor_subset < monitor.size()) monitor.resize(cfg.monitor_subset);

  EarlyStopping stopper(cfg.early_stop_window, state.best_loss, state.epochs_without_improvement);
  const data::BatchSpec spec{cfg.batch_size, cfg.seed, false};
  while (!state.stopped_early && (cfg.max_epochs == 0 || state.epoch < cfg.max_epochs)) {
    const int epoch = state.epoch + 1;
    StepLosses sum;
    const auto plan = data::batches(split.train_indices, spec, static_cast<std::uint64_t>(epoch));
    for (const auto& indices : plan) {
      const auto step = trainer.train_step(make_batch(corpus, indices));
      sum.g_total += step.g_total;
      sum.g_adv += step.g_adv;
      sum.g_seg += step.g_seg;
      sum.d_loss += step.d_loss;
    }
    const auto n = static_cast<double>(plan.size());
    EpochRecord record{epoch, {sum.g_total / n, sum.g_adv / n, sum.g_seg / n, sum.d_loss / n}, 0.0, false};

    const auto report = evaluate(trainer.generator(), corpus, monitor, /*with_hausdorff=*/false);
    record.train_dice = report.mean(metrics::Metric::kDice, metrics::ClassScope::kForeground);
    if (record.train_dice > state.best_train_dice) {
      state.best_train_dice = record.train_dice;
      state.best_epoch = epoch;
      record.checkpointed = true;
      if (persist) {
        save_models(files.best, trainer.generator(), nullptr,
                    {{"epoch", epoch}, {"train_dice", record.train_dice}});
      }
    }

    state.stopped_early = stopper.observe(record.losses.g_total);
    state.best_loss = stopper.best();
    state.epochs_without_improvement = stopper.stale_epochs();
    state.epoch = epoch;
    state.history.push_back(record);

    if (persist) {
      Discriminator& d = trainer.discriminator();
      save_models(files.last, trainer.generator(), &d, {{"epoch", epoch}});
      torch::save(trainer.generator_optimizer(), files.g_optim.string());
      torch::save(trainer.discriminator_optimizer(), files.d_optim.string());
      report::write_json(files.state, nlohmann::json(state));
    }
    if (on_epoch) on_epoch(record, trainer);
  }
  return outputs;
}

}  // namespace chromoseg::nn
