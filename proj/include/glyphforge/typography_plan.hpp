#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/image.hpp"

namespace glyphforge::plan {

// Normalized box, origin top-left. Valid iff 0 <= min < max <= 1 on both axes.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 1.0;
  double y_max = 1.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  bool valid() const noexcept;

  friend bool operator==(const BBox&, const BBox&) = default;
};

enum class FontWeight { kLight, kRegular, kBold };
enum class Alignment { kLeft, kCenter, kRight };

// The 13 color names the planner may emit.
enum class ColorName {
  kWhite, kBlack, kRed, kBlue, kGreen, kYellow, kOrange,
  kBrown, kGray, kGold, kSilver, kPurple, kPink,
};

std::string_view to_string(FontWeight w);
std::string_view to_string(Alignment a);
std::string_view to_string(ColorName c);
std::optional<FontWeight> font_weight_from_string(std::string_view s);
std::optional<Alignment> alignment_from_string(std::string_view s);
std::optional<ColorName> color_from_string(std::string_view s);
Rgb color_rgb(ColorName c);
const std::array<ColorName, 13>& all_colors();

struct TextRegion {
  std::string content;
  BBox bbox;
  std::string font = "auto";
  FontWeight font_weight = FontWeight::kRegular;
  double font_size_ratio = 0.8;  // relative to box height, in [0.1, 1.0]
  ColorName color = ColorName::kBlack;
  bool is_latex = false;
  Alignment alignment = Alignment::kCenter;
  double rotation = 0.0;  // degrees counter-clockwise, in (-180, 180]

  friend bool operator==(const TextRegion&, const TextRegion&) = default;
};

struct ImageAnalysis {
  std::string background_style;
  std::vector<std::string> dominant_colors;  // "#RRGGBB"
  std::string text_style_hint;

  friend bool operator==(const ImageAnalysis&, const ImageAnalysis&) = default;
};

struct TypographyPlan {
  ImageAnalysis image_analysis;
  std::vector<TextRegion> text_regions;

  friend bool operator==(const TypographyPlan&, const TypographyPlan&) = default;
};

// Strict parse: unknown or missing fields and out-of-range values raise
// ValidationError whose path() names the offending field.
TypographyPlan parse_plan(std::string_view json_text);
std::string serialize_plan(const TypographyPlan& plan, int indent = 2);

// Throws ValidationError if any invariant of the plan is violated.
void validate(const TypographyPlan& plan);

double bbox_iou(const BBox& a, const BBox& b);

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  bool contains(int x, int y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

// floor/ceil rasterization clamped to the image, never empty for a valid box.
PixelRect bbox_to_pixels(const BBox& b, int width, int height);

inline constexpr Rgb kGridColor{255, 0, 0};

// Pixel positions of the n+1 grid lines along an axis of `extent` pixels:
// round(k/n * extent), the last one pulled in to extent - 1. Same column a
// bbox edge at k/n lands on.
std::vector<int> grid_line_positions(int extent, int n);

// Copy of `image` (as RGB) with 1-px red lines at k/n on both axes and
// 3-decimal coordinate labels.
Image overlay_grid(const Image& image, int n);

}  // namespace glyphforge::plan
