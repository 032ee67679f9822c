#include "chromoseg/data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chromoseg/error.hpp"

namespace chromoseg::data {

Layout parse_layout(const std::string& name) {
  if (name == "canonical") return Layout::kCanonical;
  if (name == "published") return Layout::kPublished;
  throw InvalidInput("unrecognized dataset layout '" + name + "' (expected canonical|published)");
}

std::string to_string(Layout layout) {
  return layout == Layout::kCanonical ? "canonical" : "published";
}

void validate(const RawSample& sample, std::size_t index) {
  if (!sample.image.same_shape(sample.label)) {
    throw InvalidInput("sample " + std::to_string(index) + ": image and label shapes differ");
  }
  const auto labels = sample.label.values();
  const auto bad = std::find_if(labels.begin(), labels.end(),
                                [](std::uint8_t v) { return v >= kNumClasses; });
  if (bad != labels.end()) {
    throw InvalidInput("sample " + std::to_string(index) + ": label value " +
                       std::to_string(static_cast<int>(*bad)) + " outside {0,1,2,3}");
  }
}

FloatImage prepare_image(const GrayImage& raw) {
  if (raw.rows() > kCanvas || raw.cols() > kCanvas) {
    throw InvalidInput("image larger than the 128x128 canvas");
  }
  const int row0 = (kCanvas - raw.rows()) / 2;
  const int col0 = (kCanvas - raw.cols()) / 2;
  FloatImage out(kCanvas, kCanvas, 1.0f);
  for (int r = 0; r < raw.rows(); ++r)
    for (int c = 0; c < raw.cols(); ++c)
      out(r + row0, c + col0) = static_cast<float>(raw(r, c)) / 255.0f;
  return out;
}

PreparedSample prepare_sample(const RawSample& raw) {
  PreparedSample out;
  out.image = prepare_image(raw.image);
  out.label = LabelMap(kCanvas, kCanvas, kLabelPadValue);
  const int row0 = (kCanvas - raw.label.rows()) / 2;
  const int col0 = (kCanvas - raw.label.cols()) / 2;
  for (int r = 0; r < raw.label.rows(); ++r)
    for (int c = 0; c < raw.label.cols(); ++c) out.label(r + row0, c + col0) = raw.label(r, c);
  return out;
}

std::vector<float> one_hot(const LabelMap& label, int num_classes) {
  const std::size_t plane = label.size();
  std::vector<float> out(plane * static_cast<std::size_t>(num_classes), 0.0f);
  const auto values = label.values();
  for (std::size_t p = 0; p < plane; ++p) {
    const int cls = values[p];
    if (cls >= num_classes) {
      throw InvalidInput("label " + std::to_string(cls) + " >= class count " +
                         std::to_string(num_classes));
    }
    out[static_cast<std::size_t>(cls) * plane + p] = 1.0f;
  }
  return out;
}

Shuffler::Shuffler(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Shuffler::next() { return engine_(); }

std::uint64_t Shuffler::below(std::uint64_t bound) {
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = next();
  while (draw >= limit) draw = next();
  return draw % bound;
}

DatasetSplit split_dataset(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidInput("split ratio must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Shuffler(seed).shuffle(order);

  // The epsilon absorbs representation error such as 0.8 * 10 = 8.000...01.
  const auto n_train =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  DatasetSplit split;
  split.seed = seed;
  split.ratio = ratio;
  split.corpus_size = n;
  split.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return split;
}

std::vector<std::size_t> filter_overlap(const DatasetSplit& split,
                                        const std::vector<LabelMap>& labels) {
  std::vector<std::size_t> kept;
  for (const std::size_t idx : split.test_indices) {
    if (idx >= labels.size()) throw InvalidInput("split index beyond corpus size");
    const auto values = labels[idx].values();
    if (std::find(values.begin(), values.end(), kOverlapClass) != values.end()) {
      kept.push_back(idx);
    }
  }
  return kept;
}

std::vector<std::vector<std::size_t>> batches(const std::vector<std::size_t>& train_indices,
                                              const BatchSpec& spec, std::uint64_t epoch) {
  if (spec.batch_size == 0) throw InvalidInput("batch size must be at least 1");
  std::vector<std::size_t> order = train_indices;
  // Distinct, reproducible stream per (seed, epoch).
  Shuffler(spec.seed ^ (0x9E3779B97F4A7C15ULL * (epoch + 1))).shuffle(order);

  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
    const std::size_t stop = std::min(order.size(), start + spec.batch_size);
    if (spec.drop_last && stop - start < spec.batch_size) break;
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return out;
}

std::array<double, kNumClasses> inverse_frequency_weights(const std::vector<LabelMap>& labels) {
  std::array<double, kNumClasses> counts{};
  for (const auto& map : labels)
    for (const auto v : map.values())
      if (v < kNumClasses) counts[v] += 1.0;

  std::array<double, kNumClasses> weights{};
  double largest = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts[c] > 0.0) {
      weights[c] = 1.0 / counts[c];
      largest = std::max(largest, weights[c]);
    }
  }
  if (largest == 0.0) {
    weights.fill(1.0);
    return weights;
  }
  for (auto& w : weights)
    if (w == 0.0) w = largest;
  const double mean = std::accumulate(weights.begin(), weights.end(), 0.0) / kNumClasses;
  for (auto& w : weights) w /= mean;
  return weights;
}

}  // namespace chromoseg::data
