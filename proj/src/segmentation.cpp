#include "glyphforge/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "glyphforge/errors.hpp"

namespace glyphforge::seg {

std::size_t PixelMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Image PixelMask::to_image() const {
  Image img(width, height, 1, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) img.data[i] = bits[i] ? 255 : 0;
  return img;
}

PixelMask PixelMask::from_image(const Image& img) {
  const Image gray = to_gray(img);
  PixelMask m(gray.width, gray.height);
  for (std::size_t i = 0; i < m.bits.size(); ++i) m.bits[i] = gray.data[i] >= 128 ? 1 : 0;
  return m;
}

std::size_t TokenMask::count() const {
  return static_cast<std::size_t>(std::count(covered.begin(), covered.end(), std::uint8_t{1}));
}

std::vector<int> TokenMask::covered_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (covered[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> TokenMask::uncovered_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::string TokenMask::bitstring() const {
  std::string s(covered.size(), '0');
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (covered[i]) s[i] = '1';
  }
  return s;
}

TokenMask TokenMask::from_bitstring(std::string_view bits, int h, int w, double theta) {
  if (h < 0 || w < 0 || bits.size() != static_cast<std::size_t>(h) * w) {
    throw ShapeError("token bitstring length does not match grid");
  }
  TokenMask m{h, w, theta, std::vector<std::uint8_t>(bits.size())};
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw ValidationError("token bitstring must contain only 0/1");
    m.covered[i] = bits[i] == '1';
  }
  return m;
}

double between_class_variance(const std::vector<std::uint64_t>& hist, int t) {
  double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
  for (int v = 0; v < static_cast<int>(hist.size()); ++v) {
    const double c = static_cast<double>(hist[v]);
    if (v < t) {
      n0 += c;
      s0 += c * v;
    } else {
      n1 += c;
      s1 += c * v;
    }
  }
  if (n0 == 0 || n1 == 0) return 0.0;
  const double n = n0 + n1;
  const double diff = s0 / n0 - s1 / n1;
  return (n0 / n) * (n1 / n) * diff * diff;
}

int otsu_threshold(const Image& img) {
  if (img.empty()) throw DegenerateInputError("otsu: image has no pixels");
  const Image gray = to_gray(img);
  std::vector<std::uint64_t> hist(256, 0);
  for (auto v : gray.data) ++hist[v];
  const auto distinct = std::count_if(hist.begin(), hist.end(), [](auto c) { return c > 0; });
  if (distinct < 2) throw DegenerateInputError("otsu: constant image has no bimodality");

  // Incremental class sums; the variance formula matches between_class_variance.
  const double total = static_cast<double>(gray.data.size());
  double sum_all = 0;
  for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(hist[v]) * v;
  double n0 = 0, s0 = 0, best = -1.0;
  int best_t = 1;
  for (int t = 1; t < 256; ++t) {
    n0 += static_cast<double>(hist[t - 1]);
    s0 += static_cast<double>(hist[t - 1]) * (t - 1);
    const double n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const double diff = s0 / n0 - (sum_all - s0) / n1;
    const double var = (n0 / total) * (n1 / total) * diff * diff;
    if (var > best) {
      best = var;
      best_t = t;
    }
  }
  return best_t;
}

PixelMask binarize(const Image& img, int threshold, int background) {
  const Image gray = to_gray(img);
  PixelMask m(gray.width, gray.height);
  double n_lo = 0, n_hi = 0, s_lo = 0, s_hi = 0;
  for (auto v : gray.data) {
    if (v < threshold) {
      n_lo += 1;
      s_lo += v;
    } else {
      n_hi += 1;
      s_hi += v;
    }
  }
  if (n_lo == 0 || n_hi == 0) {
    m.degenerate = true;
    return m;
  }
  bool fg_low;
  if (background >= 0) {
    fg_low = std::abs(s_lo / n_lo - background) > std::abs(s_hi / n_hi - background);
  } else {
    fg_low = n_lo < n_hi;  // minority class is the glyph
  }
  for (std::size_t i = 0; i < gray.data.size(); ++i) {
    const bool low = gray.data[i] < threshold;
    m.bits[i] = (low == fg_low) ? 1 : 0;
  }
  return m;
}

TokenMask downsample_mask(const PixelMask& m, int patch, double theta) {
  if (patch <= 0) throw ValidationError("patch must be positive", "patch");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("coverage threshold must be in [0,1]", "theta");
  TokenMask t;
  t.h = (m.height + patch - 1) / patch;
  t.w = (m.width + patch - 1) / patch;
  t.theta = theta;
  t.covered.assign(static_cast<std::size_t>(t.h) * t.w, 0);
  const double area = static_cast<double>(patch) * patch;
  for (int r = 0; r < t.h; ++r) {
    for (int c = 0; c < t.w; ++c) {
      int fg = 0;
      for (int y = r * patch; y < std::min(m.height, (r + 1) * patch); ++y) {
        for (int x = c * patch; x < std::min(m.width, (c + 1) * patch); ++x) fg += m.at(x, y);
      }
      t.covered[static_cast<std::size_t>(r) * t.w + c] = (fg / area >= theta) ? 1 : 0;
    }
  }
  return t;
}

}  // namespace glyphforge::seg
