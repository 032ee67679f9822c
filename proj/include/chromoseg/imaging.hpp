#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "chromoseg/grid.hpp"

namespace chromoseg::imaging {

using Rgb = std::array<std::uint8_t, 3>;

// background black, first chromosome red, second green, overlap blue
inline constexpr std::array<Rgb, 4> kClassPalette{
    Rgb{0, 0, 0}, Rgb{255, 0, 0}, Rgb{0, 255, 0}, Rgb{0, 0, 255}};

// Row-major RGB triplets.
struct RgbImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;

  Rgb at(int r, int c) const;
};

RgbImage colorize(const LabelMap& labels);

// Pixels where prediction and truth agree are black; every mismatch takes
// the palette colour of the predicted class.
RgbImage difference_image(const LabelMap& pred, const LabelMap& gt);

void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_png_gray(const std::filesystem::path& path);
RgbImage read_png_rgb(const std::filesystem::path& path);

}  // namespace chromoseg::imaging
