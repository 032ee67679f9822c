#pragma once

#include <torch/torch.h>

#include <filesystem>
#include <functional>
#include <limits>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "chromoseg/architecture.hpp"
#include "chromoseg/data.hpp"
#include "chromoseg/error.hpp"
#include "chromoseg/loss_reference.hpp"
#include "chromoseg/metrics.hpp"
#include "chromoseg/nn/discriminator.hpp"
#include "chromoseg/nn/generator.hpp"
#include "chromoseg/nn/losses.hpp"

namespace chromoseg::nn {

struct OptimizerConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;

  void validate() const;
};

struct TrainConfig {
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  losses::LossConfig loss;
  OptimizerConfig generator_optimizer;
  OptimizerConfig discriminator_optimizer;
  bool gan_enabled = true;
  std::size_t batch_size = 64;
  std::uint64_t seed = 123;
  // Stop after this many consecutive epochs without a new lowest mean
  // generator loss.
  int early_stop_window = 15;
  int max_epochs = 0;  // 0: no cap
  // Training samples scored for best-Dice checkpointing; 0 means all.
  std::size_t monitor_subset = 0;
  // Weighted losses: derive class weights from training-split pixel counts.
  bool auto_class_weights = true;
  std::filesystem::path output_dir;  // empty: keep everything in memory
  bool resume = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const OptimizerConfig& cfg);
void from_json(const nlohmann::json& j, OptimizerConfig& cfg);
void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

struct StepLosses {
  double g_total = 0.0;
  double g_adv = 0.0;
  double g_seg = 0.0;
  double d_loss = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  StepLosses losses;  // means over the epoch's batches
  double train_dice = 0.0;
  bool checkpointed = false;
};

struct TrainState {
  int epoch = 0;  // last completed epoch
  double best_train_dice = -1.0;
  int best_epoch = 0;
  int epochs_without_improvement = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  std::uint64_t rng_seed = 123;
  bool stopped_early = false;
  std::vector<EpochRecord> history;
};

void to_json(nlohmann::json& j, const TrainState& state);
void from_json(const nlohmann::json& j, TrainState& state);

// Patience counter on the monitored epoch loss.
class EarlyStopping {
 public:
  explicit EarlyStopping(int window, double best = std::numeric_limits<double>::infinity(), int stale = 0);
  // Records one epoch; true once `window` epochs in a row failed to improve.
  bool observe(double loss);
  double best() const { return best_; }
  int stale_epochs() const { return stale_; }

 private:
  int window_;
  double best_;
  int stale_;
};

class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss(const std::string& what, std::vector<std::size_t> batch_indices);
  const std::vector<std::size_t>& batch_indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

struct Batch {
  torch::Tensor images;   // [B, 1, S, S] float
  torch::Tensor labels;   // [B, S, S] int64
  torch::Tensor one_hot;  // [B, C, S, S] float
  std::vector<std::size_t> indices;
};

Batch make_batch(std::span<const data::PreparedSample> corpus, std::span<const std::size_t> indices,
                 int classes = data::kNumClasses);

torch::Tensor images_to_tensor(std::span<const FloatImage> images);
std::vector<LabelMap> tensor_to_labels(const torch::Tensor& labels);

// Owns both networks and their optimisers. Construction seeds torch from
// cfg.seed so identical configs start from identical weights.
class Trainer {
 public:
  explicit Trainer(TrainConfig cfg);

  // One alternating update: discriminator on (real, detached fake), then
  // generator on the combined objective with the discriminator frozen.
  StepLosses train_step(const Batch& batch);

  // The two halves of train_step, exposed for checking the alternation.
  double update_discriminator(const Batch& batch, const torch::Tensor& probs);
  GeneratorLoss update_generator(const Batch& batch, const torch::Tensor& probs);

  Generator& generator() { return generator_; }
  Discriminator& discriminator() { return discriminator_; }
  torch::optim::Adam& generator_optimizer() { return *g_opt_; }
  torch::optim::Adam& discriminator_optimizer() { return *d_opt_; }
  const TrainConfig& config() const { return cfg_; }
  void set_class_weights(const std::array<double, 4>& weights);

 private:
  TrainConfig cfg_;
  Generator generator_{nullptr};
  Discriminator discriminator_{nullptr};
  std::unique_ptr<torch::optim::Adam> g_opt_;
  std::unique_ptr<torch::optim::Adam> d_opt_;
};

// Maps a [B,1,S,S] batch to class probabilities [B,C,S,S].
using Predictor = std::function<torch::Tensor(const torch::Tensor&)>;

// Arg-max segmentation of the indexed samples scored against their labels.
// Throws InvalidInput for an empty index list.
metrics::MetricsReport evaluate(const Predictor& predict, std::span<const data::PreparedSample> corpus,
                                std::span<const std::size_t> indices, bool with_hausdorff = true,
                                std::size_t batch_size = 16);

// Runs the generator in inference mode and restores its previous mode.
metrics::MetricsReport evaluate(Generator& generator, std::span<const data::PreparedSample> corpus,
                                std::span<const std::size_t> indices, bool with_hausdorff = true,
                                std::size_t batch_size = 16);

std::vector<LabelMap> segment(Generator& generator, std::span<const FloatImage> images,
                              std::size_t batch_size = 16);

struct FitOutputs {
  TrainState state;
  TrainConfig resolved;  // config after class-weight resolution
  std::filesystem::path best_checkpoint;  // empty when no output_dir
  std::filesystem::path last_checkpoint;
};

using EpochCallback = std::function<void(const EpochRecord&, Trainer&)>;

// Full training loop: shuffled batches per epoch, train-set Dice after each
// epoch with a checkpoint on improvement, early stopping on the mean epoch
// generator loss. With output_dir set, also writes last-epoch state so an
// interrupted run can resume.
FitOutputs fit(std::span<const data::PreparedSample> corpus, const data::DatasetSplit& split,
               TrainConfig cfg, const EpochCallback& on_epoch = {});

}  // namespace chromoseg::nn
