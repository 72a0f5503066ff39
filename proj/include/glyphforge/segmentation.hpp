#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/image.hpp"

namespace glyphforge::seg {

struct PixelMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 background, 1 foreground; row-major

  PixelMask() = default;
  PixelMask(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count() const;
  // true when one of the two classes is empty (threshold at an extreme)
  bool degenerate = false;

  Image to_image() const;  // 0/255 gray
  static PixelMask from_image(const Image& gray);  // >= 128 is foreground

  friend bool operator==(const PixelMask&, const PixelMask&) = default;
};

struct TokenMask {
  int h = 0;
  int w = 0;
  double theta = 0.25;
  std::vector<std::uint8_t> covered;  // h*w, row-major

  bool at(int r, int c) const { return covered[static_cast<std::size_t>(r) * w + c] != 0; }
  std::size_t count() const;
  std::vector<int> covered_indices() const;
  std::vector<int> uncovered_indices() const;
  std::string bitstring() const;
  static TokenMask from_bitstring(std::string_view bits, int h, int w, double theta = 0.25);

  friend bool operator==(const TokenMask&, const TokenMask&) = default;
};

// Between-class variance for splitting the histogram into {v < t} and {v >= t}.
double between_class_variance(const std::vector<std::uint64_t>& hist, int t);

// Otsu over the 256-bin histogram of `gray` (RGB input is converted). Returns
// t in [1, 255]: class 0 is v < t. Ties go to the smallest t. Throws
// DegenerateInputError for constant images.
int otsu_threshold(const Image& gray);

// Splits at `threshold` (v < threshold vs v >= threshold). The foreground is the
// class whose mean lies farther from `background` (gray level); with no
// background given the majority class is background. If either class is
// empty the mask is all zero and flagged degenerate.
PixelMask binarize(const Image& gray, int threshold, int background = -1);

// Token covered iff the foreground fraction of its patch is >= theta. The mask
// is padded with background up to patch multiples.
TokenMask downsample_mask(const PixelMask& m, int patch, double theta = 0.25);

}  // namespace glyphforge::seg
