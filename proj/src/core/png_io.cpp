#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "chromoseg/error.hpp"
#include "chromoseg/imaging.hpp"

namespace chromoseg::imaging {

Rgb RgbImage::at(int r, int c) const {
  const auto i = static_cast<std::size_t>(r * cols + c) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

RgbImage colorize(const LabelMap& labels) {
  RgbImage out{labels.rows(), labels.cols(), std::vector<std::uint8_t>(labels.size() * 3)};
  const auto values = labels.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= kClassPalette.size()) throw InvalidInput("label outside the palette");
    const auto& rgb = kClassPalette[values[i]];
    std::copy(rgb.begin(), rgb.end(), out.pixels.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  return out;
}

RgbImage difference_image(const LabelMap& pred, const LabelMap& gt) {
  if (!pred.same_shape(gt)) throw InvalidInput("prediction and ground truth shapes differ");
  RgbImage out{pred.rows(), pred.cols(), std::vector<std::uint8_t>(pred.size() * 3, 0)};
  const auto p = pred.values();
  const auto g = gt.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= kClassPalette.size() || g[i] >= kClassPalette.size()) {
      throw InvalidInput("label outside the palette");
    }
    if (p[i] == g[i]) continue;
    const auto& rgb = kClassPalette[p[i]];
    std::copy(rgb.begin(), rgb.end(), out.pixels.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  return out;
}

namespace {

using FilePtr = std::unique_ptr<FILE, int (*)(FILE*)>;

FilePtr open(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode), &std::fclose);
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

void write_rows(const std::filesystem::path& path, int rows, int cols, int color_type, int channels,
                const std::uint8_t* data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto file = open(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < rows; ++r) {
    png_write_row(png, const_cast<png_bytep>(data + static_cast<std::size_t>(r * cols * channels)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Decodes to 8-bit with the requested channel count (1 gray, 3 RGB).
std::vector<std::uint8_t> read_any(const std::filesystem::path& path, int channels, int& rows, int& cols) {
  auto file = open(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed reading PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  const bool is_gray = (color & PNG_COLOR_MASK_COLOR) == 0;
  if (channels == 1 && !is_gray) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (channels == 3 && is_gray) png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  rows = static_cast<int>(png_get_image_height(png, info));
  cols = static_cast<int>(png_get_image_width(png, info));
  std::vector<std::uint8_t> data(static_cast<std::size_t>(rows * cols * channels));
  for (int r = 0; r < rows; ++r) png_read_row(png, data.data() + static_cast<std::size_t>(r * cols * channels), nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return data;
}

}  // namespace

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  write_rows(path, image.rows, image.cols, PNG_COLOR_TYPE_RGB, 3, image.pixels.data());
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
  write_rows(path, image.rows(), image.cols(), PNG_COLOR_TYPE_GRAY, 1, image.values().data());
}

GrayImage read_png_gray(const std::filesystem::path& path) {
  int rows = 0;
  int cols = 0;
  const auto data = read_any(path, 1, rows, cols);
  GrayImage out(rows, cols);
  std::copy(data.begin(), data.end(), out.values().begin());
  return out;
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
  RgbImage out;
  out.pixels = read_any(path, 3, out.rows, out.cols);
  return out;
}

}  // namespace chromoseg::imaging
