#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/font.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/typography_plan.hpp"

namespace glyphforge::render {

// Unicode symbol <-> LaTeX command table, loaded from `symbol<TAB>latex` TSV.
class LatexTable {
 public:
  static const LatexTable& builtin();
  static LatexTable parse_tsv(std::string_view tsv);

  const std::string* to_latex(char32_t cp) const;
  // "\alpha" -> U'α'. Only single-symbol commands are reversible.
  char32_t from_command(std::string_view command) const;
  bool contains(char32_t cp) const { return to_latex_.count(cp) != 0; }

 private:
  std::map<char32_t, std::string> to_latex_;
  std::map<std::string, char32_t, std::less<>> from_command_;
};

// True when `content` looks like a formula: it carries a math marker
// (=, ^, _, a \command, a Greek letter, a script digit or any symbol of the
// conversion table) and at least two non-space characters.
bool detect_math(std::string_view content);

// Replaces every table symbol by its LaTeX form. Adjacent script symbols are
// merged (x²³ -> x^{23}). Idempotent.
std::string unicode_to_latex(std::string_view content, const LatexTable& table = LatexTable::builtin());

using MeasureFn = std::function<int(std::string_view line)>;

// Greedy whitespace-first line breaking with a forced mid-token break for
// tokens wider than the box. Throws ValidationError if a single glyph is
// wider than `box_width_px`.
std::vector<std::string> break_lines(std::string_view content, int box_width_px, const MeasureFn& measure);
std::vector<std::string> break_lines(std::string_view content, int box_width_px, const BitmapFont& font,
                                     int size_px);

enum class Capability { kStructuredMath, kPlainText };

struct LineStyle {
  const BitmapFont* font = nullptr;
  int size_px = 16;
  plan::FontWeight weight = plan::FontWeight::kRegular;
};

// Gray coverage raster of one line plus the code points the font lacked.
struct LineRaster {
  Image coverage;
  std::vector<char32_t> missing;
};

class RenderBackend {
 public:
  virtual ~RenderBackend() = default;
  virtual Capability capability() const = 0;
  virtual std::string_view name() const = 0;
  virtual int measure(std::string_view line, const LineStyle& style) const = 0;
  virtual LineRaster render(std::string_view line, const LineStyle& style) const = 0;
};

class PlainTextBackend final : public RenderBackend {
 public:
  Capability capability() const override { return Capability::kPlainText; }
  std::string_view name() const override { return "plain-text"; }
  int measure(std::string_view line, const LineStyle& style) const override;
  LineRaster render(std::string_view line, const LineStyle& style) const override;
};

// Linear math layout of LaTeX-converted strings: scripts are raised or lowered
// at 0.6x size, \frac{a}{b} renders as a/b, symbol commands map back to
// glyphs. `math_font` replaces the region font when set.
class StructuredMathBackend final : public RenderBackend {
 public:
  explicit StructuredMathBackend(const BitmapFont* math_font = nullptr,
                                 const LatexTable& table = LatexTable::builtin());
  Capability capability() const override { return Capability::kStructuredMath; }
  std::string_view name() const override { return "structured-math"; }
  int measure(std::string_view line, const LineStyle& style) const override;
  LineRaster render(std::string_view line, const LineStyle& style) const override;

 private:
  struct Run {
    std::u32string text;
    int level = 0;  // +1 superscript, -1 subscript
  };
  std::vector<Run> layout(std::string_view line) const;
  LineStyle effective(const LineStyle& style) const;

  const BitmapFont* math_font_;
  const LatexTable* table_;
};

// Renders one line with the given backend; bold weight thickens strokes by one pixel.
LineRaster render_line(std::string_view line, const LineStyle& style, const RenderBackend& backend);

struct ComposedLines {
  Image image;
  std::vector<int> x_offsets;
  std::vector<int> y_offsets;
};

// Stacks line rasters top to bottom with a gap of 0.2x the tallest line.
ComposedLines compose_lines(std::span<const Image> lines, plan::Alignment alignment);

inline int line_gap(int line_height) { return static_cast<int>(std::lround(0.2 * line_height)); }

enum class Interpolation { kNearest, kBilinear };

// Counter-clockwise rotation about the center; the canvas grows to bound the
// rotated content and uncovered pixels are 0. Multiples of 90 degrees are exact.
Image rotate_canvas(const Image& img, double degrees, Interpolation interp = Interpolation::kBilinear);

struct RenderOptions {
  bool structured_math = true;
  int min_font_px = 4;
};

struct GlyphTemplate {
  Image image;  // RGB, glyph strokes on a uniform background
  Image mask;   // gray 0/255, 255 = glyph
  plan::TextRegion region;
  std::vector<std::string> lines;
  bool is_math = false;
  bool fallback_used = false;
  std::string backend;
  Rgb background{255, 255, 255};
  int font_px = 0;
  plan::PixelRect rect;
  std::vector<std::string> warnings;

  friend bool operator==(const GlyphTemplate&, const GlyphTemplate&) = default;
};

// Background fill for a glyph color: white, or black for light glyph colors.
Rgb template_background(plan::ColorName color);

GlyphTemplate render_template(const plan::TextRegion& region, int canvas_w, int canvas_h,
                              const FontRegistry& registry, const RenderOptions& options = {});

// All regions of a plan on one canvas. `image`/`mask` are the union; the
// per-region metadata (lines, fallback flags, warnings) is concatenated.
struct PlanTemplate {
  Image image;
  Image mask;
  Rgb background{255, 255, 255};
  std::vector<GlyphTemplate> regions;
};
PlanTemplate render_plan(const plan::TypographyPlan& plan, int canvas_w, int canvas_h,
                         const FontRegistry& registry, const RenderOptions& options = {});

}  // namespace glyphforge::render
