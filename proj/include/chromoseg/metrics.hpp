#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chromoseg/grid.hpp"

namespace chromoseg::metrics {

// counts(i, j): pixels whose true class is i and predicted class is j.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes = 4);

  int classes() const { return classes_; }
  std::int64_t& at(int truth, int predicted) { return counts_[index(truth, predicted)]; }
  std::int64_t at(int truth, int predicted) const { return counts_[index(truth, predicted)]; }
  std::int64_t total() const;

  std::int64_t true_positives(int c) const;
  std::int64_t false_positives(int c) const;
  std::int64_t false_negatives(int c) const;
  std::int64_t true_negatives(int c) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  // Rows divided by their sums; rows with no pixels stay zero.
  std::vector<double> row_normalized() const;

 private:
  std::size_t index(int truth, int predicted) const {
    return static_cast<std::size_t>(truth * classes_ + predicted);
  }
  int classes_;
  std::vector<std::int64_t> counts_;
};

// Throws InvalidInput on shape mismatch or labels >= classes.
ConfusionMatrix confusion_matrix(const LabelMap& pred, const LabelMap& gt, int classes = 4);

// trace / total. Throws InvalidInput for an empty matrix.
double pixel_accuracy(const ConfusionMatrix& cm);

// A ratio metric with its zero-denominator status. `absent` marks a class
// missing from both prediction and ground truth; such classes score a
// perfect value. Any other zero denominator leaves the score undefined.
struct Score {
  double value = 0.0;
  bool defined = false;
  bool absent = false;
};

struct ClassMetrics {
  Score dice;
  Score iou;
  Score precision;
  Score recall;
  Score fnr;
  Score fpr;
};

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm);

struct Point {
  int row = 0;
  int col = 0;
};

std::vector<Point> class_points(const LabelMap& map, int cls);

// Symmetric Hausdorff distance in pixels; nullopt when either set is empty.
std::optional<double> hausdorff(std::span<const Point> a, std::span<const Point> b);

enum class Metric { kAccuracy, kDice, kIoU, kPrecision, kRecall, kFnr, kFpr, kHausdorff };
inline constexpr std::array<Metric, 8> kAllMetrics{
    Metric::kAccuracy, Metric::kDice, Metric::kIoU, Metric::kPrecision,
    Metric::kRecall, Metric::kFnr, Metric::kFpr, Metric::kHausdorff};
std::string metric_name(Metric m);

struct SampleMetrics {
  double accuracy = 0.0;
  std::vector<ClassMetrics> classes;
  std::vector<Score> hausdorff;  // per class
  ConfusionMatrix confusion;
};

// Without Hausdorff every distance entry is left undefined.
SampleMetrics evaluate_sample(const LabelMap& pred, const LabelMap& gt, int classes = 4,
                              bool with_hausdorff = true);

// Which classes enter the macro mean.
enum class ClassScope { kAll, kForeground };

struct MetricsReport {
  std::size_t samples = 0;
  int classes = 4;
  double accuracy = 0.0;  // mean over samples
  // Per class: mean over samples of the defined entries (NaN if none).
  std::array<std::vector<double>, 8> per_class;
  // Per class: entries excluded from the mean as undefined.
  std::array<std::vector<std::size_t>, 8> excluded;
  // Per class: entries where the class was absent from both maps.
  std::vector<std::size_t> absent;
  ConfusionMatrix confusion;  // summed over samples

  // Macro mean of per-class means over the chosen classes (accuracy is a
  // pixel-level quantity and ignores the scope).
  double mean(Metric m, ClassScope scope) const;
  double class_value(Metric m, int cls) const;
};

// Mean over samples per class, then (on request) over classes. Throws
// InvalidInput for zero samples.
MetricsReport aggregate_report(std::span<const SampleMetrics> samples);

}  // namespace chromoseg::metrics
