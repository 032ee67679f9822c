#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "chromoseg/grid.hpp"

namespace chromoseg::data {

inline constexpr int kRawRows = 94;
inline constexpr int kRawCols = 93;
inline constexpr int kCanvas = 128;
inline constexpr int kNumClasses = 4;
inline constexpr std::uint8_t kOverlapClass = 3;
inline constexpr std::uint8_t kImagePadValue = 255;
inline constexpr std::uint8_t kLabelPadValue = 0;

// Top-left corner of the raw window inside the padded canvas.
inline constexpr int kRowOffset = (kCanvas - kRawRows) / 2;
inline constexpr int kColOffset = (kCanvas - kRawCols) / 2;

struct RawSample {
  GrayImage image;  // 94x93 gray levels
  LabelMap label;   // 94x93 class ids in {0,1,2,3}
};

struct PreparedSample {
  FloatImage image;  // 128x128, values in [0,1]
  LabelMap label;    // 128x128
};

enum class Layout { kCanonical, kPublished };

Layout parse_layout(const std::string& name);
std::string to_string(Layout layout);

struct LoadOptions {
  Layout layout = Layout::kCanonical;
  // Published container only: name of the 4-D (N,H,W,2) array. Empty means
  // auto-detect the single such array at the file root.
  std::string published_array;
  int image_slice = 0;
  int label_slice = 1;
};

// Reads a corpus and validates every sample. Throws IoError for unreadable
// or unrecognised files and InvalidInput (naming the sample) for label
// values outside {0,1,2,3}.
std::vector<RawSample> load_dataset(const std::filesystem::path& path,
                                    const LoadOptions& options = {});

// Writes the canonical container: `images` and `labels` (N x 94 x 93, u8)
// plus a JSON `meta` attribute on the root group.
void save_canonical(const std::filesystem::path& path,
                    const std::vector<RawSample>& samples);

// Writes a published-style container: one (N,H,W,2) u8 array.
void save_published(const std::filesystem::path& path,
                    const std::vector<RawSample>& samples,
                    const std::string& array_name = "dataset");

void validate(const RawSample& sample, std::size_t index);

PreparedSample prepare_sample(const RawSample& raw);

// Pads an arbitrary raw-size gray image the same way prepare_sample does.
FloatImage prepare_image(const GrayImage& raw);

// Inverse of the canvas placement: extracts the 94x93 window.
template <typename T>
Grid<T> crop_to_raw(const Grid<T>& canvas) {
  Grid<T> out(kRawRows, kRawCols);
  for (int r = 0; r < kRawRows; ++r)
    for (int c = 0; c < kRawCols; ++c) out(r, c) = canvas(r + kRowOffset, c + kColOffset);
  return out;
}

// C x H x W indicator array, channel-major.
std::vector<float> one_hot(const LabelMap& label, int num_classes);

// Portable shuffling: std::mt19937_64 output is fixed by the standard and the
// bounded draw below is ours, so permutations match across platforms.
class Shuffler {
 public:
  explicit Shuffler(std::uint64_t seed);
  std::uint64_t next();
  // Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

struct DatasetSplit {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::vector<std::size_t> overlap_test_indices;
  std::uint64_t seed = 123;
  double ratio = 0.8;
  std::size_t corpus_size = 0;
};

// Shuffles [0, n) and takes floor(ratio * n) for training; the remainder is
// the test set. Throws InvalidInput unless 0 < ratio < 1.
DatasetSplit split_dataset(std::size_t n, double ratio, std::uint64_t seed);

// Test indices whose label map contains at least one overlap pixel.
std::vector<std::size_t> filter_overlap(const DatasetSplit& split,
                                        const std::vector<LabelMap>& labels);

struct BatchSpec {
  std::size_t batch_size = 64;
  std::uint64_t seed = 123;
  bool drop_last = false;
};

std::vector<std::vector<std::size_t>> batches(const std::vector<std::size_t>& train_indices,
                                              const BatchSpec& spec, std::uint64_t epoch);

// Inverse class pixel frequency over the given maps, normalised to mean 1.
// Classes that never occur get the largest observed weight.
std::array<double, kNumClasses> inverse_frequency_weights(const std::vector<LabelMap>& labels);

}  // namespace chromoseg::data
