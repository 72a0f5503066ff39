#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace glyphforge {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Interleaved 8-bit raster, 1 (gray) or 3 (RGB) channels, row-major.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0);

  static Image filled(int w, int h, Rgb color);

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  Rgb rgb(int x, int y) const;
  void set_rgb(int x, int y, Rgb color);

  friend bool operator==(const Image&, const Image&) = default;
};

// BT.601 luma with integer rounding; identity on gray images.
Image to_gray(const Image& img);
Image to_rgb(const Image& img);

// PNG codec (libpng). Output is byte-deterministic for identical input.
std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(std::span<const std::uint8_t> bytes);
void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

}  // namespace glyphforge
