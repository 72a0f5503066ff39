#include "glyphforge/glyph_renderer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glyphforge/errors.hpp"
#include "glyphforge/resources.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge::render {

namespace {

bool is_ascii_letter(char32_t cp) { return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'); }
bool is_greek(char32_t cp) { return cp >= 0x391 && cp <= 0x3C9; }
bool is_script_digit(char32_t cp) {
  return cp == 0xB2 || cp == 0xB3 || cp == 0xB9 || (cp >= 0x2070 && cp <= 0x209F);
}

// Splits "^{xy}" into its script marker and inner text; empty marker otherwise.
std::pair<char, std::string> split_script(const std::string& latex) {
  if (latex.size() >= 4 && (latex[0] == '^' || latex[0] == '_') && latex[1] == '{' && latex.back() == '}') {
    return {latex[0], latex.substr(2, latex.size() - 3)};
  }
  return {0, {}};
}

Image embolden(const Image& cov) {
  Image out = cov;
  for (int y = 0; y < cov.height; ++y) {
    for (int x = 1; x < cov.width; ++x) out.at(x, y) = std::max(cov.at(x, y), cov.at(x - 1, y));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Conversion table

const LatexTable& LatexTable::builtin() {
  static const LatexTable table = parse_tsv(resources::get("latex_table.tsv"));
  return table;
}

LatexTable LatexTable::parse_tsv(std::string_view tsv) {
  LatexTable t;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < tsv.size()) {
    auto nl = tsv.find('\n', pos);
    if (nl == std::string_view::npos) nl = tsv.size();
    std::string_view line = tsv.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ValidationError("latex table: missing TAB on line " + std::to_string(line_no));
    }
    const auto sym = text::decode_utf8(line.substr(0, tab));
    if (sym.size() != 1) throw ValidationError("latex table: symbol must be one code point on line " + std::to_string(line_no));
    std::string latex(line.substr(tab + 1));
    if (latex.size() > 1 && latex[0] == '\\' && is_ascii_letter(static_cast<unsigned char>(latex[1]))) {
      t.from_command_.emplace(latex.substr(1), sym[0]);
    }
    t.to_latex_[sym[0]] = std::move(latex);
  }
  return t;
}

const std::string* LatexTable::to_latex(char32_t cp) const {
  const auto it = to_latex_.find(cp);
  return it == to_latex_.end() ? nullptr : &it->second;
}

char32_t LatexTable::from_command(std::string_view command) const {
  if (!command.empty() && command.front() == '\\') command.remove_prefix(1);
  const auto it = from_command_.find(command);
  return it == from_command_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// Math detection and conversion

bool detect_math(std::string_view content) {
  const auto cps = text::decode_utf8(content);
  const auto& table = LatexTable::builtin();
  std::size_t non_space = 0;
  bool marker = false;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (!text::is_space(cp)) ++non_space;
    if (cp == U'=' || cp == U'^' || cp == U'_' || is_greek(cp) || is_script_digit(cp) || table.contains(cp)) {
      marker = true;
    } else if (cp == U'\\' && i + 1 < cps.size() && is_ascii_letter(cps[i + 1])) {
      marker = true;
    }
  }
  return marker && non_space >= 2;
}

std::string unicode_to_latex(std::string_view content, const LatexTable& table) {
  const auto cps = text::decode_utf8(content);
  std::string out;
  out.reserve(content.size() + 8);
  bool after_command = false;
  for (std::size_t i = 0; i < cps.size();) {
    const std::string* latex = table.to_latex(cps[i]);
    if (latex == nullptr) {
      if (after_command && is_ascii_letter(cps[i])) out.push_back(' ');
      text::append_utf8(out, cps[i]);
      after_command = false;
      ++i;
      continue;
    }
    const auto [marker, inner] = split_script(*latex);
    if (marker != 0) {
      std::string merged = inner;
      std::size_t j = i + 1;
      while (j < cps.size()) {
        const std::string* next = table.to_latex(cps[j]);
        if (next == nullptr) break;
        const auto [m2, in2] = split_script(*next);
        if (m2 != marker) break;
        merged += in2;
        ++j;
      }
      out.push_back(marker);
      out += "{" + merged + "}";
      after_command = false;
      i = j;
      continue;
    }
    if (after_command && !latex->empty() && is_ascii_letter(static_cast<unsigned char>(latex->front()))) {
      out.push_back(' ');
    }
    out += *latex;
    after_command = latex->size() > 1 && latex->front() == '\\' && is_ascii_letter(static_cast<unsigned char>(latex->back()));
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Line breaking

std::vector<std::string> break_lines(std::string_view content, int box_width_px, const MeasureFn& measure) {
  if (box_width_px < 1) throw ValidationError("box width must be >= 1 px");
  const std::string normalized = text::collapse_whitespace(content);
  std::vector<std::string> lines;
  std::string cur;
  std::size_t pos = 0;
  while (pos < normalized.size()) {
    auto sp = normalized.find(' ', pos);
    if (sp == std::string::npos) sp = normalized.size();
    std::string word = normalized.substr(pos, sp - pos);
    pos = sp + 1;

    const std::string candidate = cur.empty() ? word : cur + " " + word;
    if (measure(candidate) <= box_width_px) {
      cur = candidate;
      continue;
    }
    if (!cur.empty()) {
      lines.push_back(std::move(cur));
      cur.clear();
    }
    auto cps = text::decode_utf8(word);
    while (measure(text::encode_utf8(cps)) > box_width_px) {
      std::size_t fit = 0;
      while (fit < cps.size() &&
             measure(text::encode_utf8(std::u32string_view(cps).substr(0, fit + 1))) <= box_width_px) {
        ++fit;
      }
      if (fit == 0) throw ValidationError("box too narrow for any glyph");
      lines.push_back(text::encode_utf8(std::u32string_view(cps).substr(0, fit)));
      cps.erase(0, fit);
    }
    cur = text::encode_utf8(cps);
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

std::vector<std::string> break_lines(std::string_view content, int box_width_px, const BitmapFont& font,
                                     int size_px) {
  return break_lines(content, box_width_px,
                     [&](std::string_view line) { return font.measure(line, size_px); });
}

// ---------------------------------------------------------------------------
// Backends

int PlainTextBackend::measure(std::string_view line, const LineStyle& style) const {
  return style.font->measure(line, style.size_px);
}

LineRaster PlainTextBackend::render(std::string_view line, const LineStyle& style) const {
  LineRaster out;
  out.coverage = style.font->render(line, style.size_px, &out.missing);
  return out;
}

StructuredMathBackend::StructuredMathBackend(const BitmapFont* math_font, const LatexTable& table)
    : math_font_(math_font), table_(&table) {}

LineStyle StructuredMathBackend::effective(const LineStyle& style) const {
  LineStyle s = style;
  if (math_font_ != nullptr) s.font = math_font_;
  return s;
}

std::vector<StructuredMathBackend::Run> StructuredMathBackend::layout(std::string_view line) const {
  const auto cps = text::decode_utf8(line);
  std::vector<Run> runs;
  auto emit = [&](std::u32string_view s, int level) {
    if (s.empty()) return;
    if (runs.empty() || runs.back().level != level) runs.push_back({{}, level});
    runs.back().text += s;
  };

  // Recursive descent over a tiny LaTeX subset; unknown syntax renders literally.
  std::function<void(std::size_t&, int, bool)> parse_seq;
  auto parse_group = [&](std::size_t& i, int level) {
    if (i < cps.size() && cps[i] == U'{') {
      ++i;
      parse_seq(i, level, true);
      if (i < cps.size() && cps[i] == U'}') ++i;
    } else if (i < cps.size()) {
      parse_seq(i, level, false);
    }
  };
  parse_seq = [&](std::size_t& i, int level, bool until_brace) {
    bool single = !until_brace;
    while (i < cps.size()) {
      const char32_t cp = cps[i];
      if (until_brace && cp == U'}') return;
      if (cp == U'{') {
        parse_group(i, level);
      } else if (cp == U'^' || cp == U'_') {
        ++i;
        const int script = std::clamp(level + (cp == U'^' ? 1 : -1), -1, 1);
        parse_group(i, script);
      } else if (cp == U'\\' && i + 1 < cps.size() && is_ascii_letter(cps[i + 1])) {
        std::size_t j = i + 1;
        while (j < cps.size() && is_ascii_letter(cps[j])) ++j;
        const std::string cmd = text::encode_utf8(std::u32string_view(cps).substr(i + 1, j - i - 1));
        i = j;
        if (i < cps.size() && cps[i] == U' ') ++i;
        if (cmd == "frac" || cmd == "dfrac" || cmd == "tfrac") {
          parse_group(i, level);
          emit(U"/", level);
          parse_group(i, level);
        } else if (const char32_t sym = table_->from_command(cmd); sym != 0) {
          emit(std::u32string(1, sym), level);
        } else if (cmd == "left" || cmd == "right" || cmd == "mathrm" || cmd == "text" ||
                   cmd == "mathbf" || cmd == "displaystyle") {
          // layout-only commands: keep the argument, drop the command
        } else {
          emit(text::decode_utf8(cmd), level);
        }
      } else if (cp == U'\\' && i + 1 < cps.size()) {
        const char32_t next = cps[i + 1];
        emit(next == U',' || next == U';' || next == U'\\' ? std::u32string(U" ") : std::u32string(1, next), level);
        i += 2;
      } else {
        emit(std::u32string(1, cp), level);
        ++i;
      }
      if (single) return;
    }
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    parse_seq(i, 0, false);
    if (i < cps.size() && cps[i] == U'}') {
      emit(U"}", 0);
      ++i;
    }
  }
  return runs;
}

namespace {
int script_size(int size_px) { return std::max(1, static_cast<int>(std::lround(size_px * 0.6))); }
}  // namespace

int StructuredMathBackend::measure(std::string_view line, const LineStyle& style) const {
  const LineStyle s = effective(style);
  int w = 0;
  for (const auto& run : layout(line)) {
    w += s.font->measure(run.text, run.level == 0 ? s.size_px : script_size(s.size_px));
  }
  return w;
}

LineRaster StructuredMathBackend::render(std::string_view line, const LineStyle& style) const {
  const LineStyle s = effective(style);
  const auto runs = layout(line);
  const int width = measure(line, style);
  if (width <= 0) throw DegenerateInputError("cannot render an empty line (zero-width canvas)");
  LineRaster out;
  out.coverage = Image(width, s.size_px, 1, 0);
  int pen = 0;
  for (const auto& run : runs) {
    const int px = run.level == 0 ? s.size_px : script_size(s.size_px);
    const Image part = s.font->render(run.text, px, &out.missing);
    const int y0 = run.level < 0 ? s.size_px - px : 0;
    for (int y = 0; y < part.height; ++y) {
      for (int x = 0; x < part.width && pen + x < width; ++x) {
        if (part.at(x, y)) out.coverage.at(pen + x, y0 + y) = part.at(x, y);
      }
    }
    pen += part.width;
  }
  return out;
}

LineRaster render_line(std::string_view line, const LineStyle& style, const RenderBackend& backend) {
  if (line.empty()) throw DegenerateInputError("cannot render an empty line (zero-width canvas)");
  if (style.font == nullptr) throw ValidationError("line style has no font");
  LineRaster out = backend.render(line, style);
  if (style.weight == plan::FontWeight::kBold) out.coverage = embolden(out.coverage);
  return out;
}

// ---------------------------------------------------------------------------
// Composition and rotation

ComposedLines compose_lines(std::span<const Image> lines, plan::Alignment alignment) {
  if (lines.empty()) throw ValidationError("no lines to compose");
  int width = 0;
  int tallest = 0;
  for (const auto& l : lines) {
    width = std::max(width, l.width);
    tallest = std::max(tallest, l.height);
  }
  const int gap = lines.size() > 1 ? line_gap(tallest) : 0;
  int height = 0;
  for (const auto& l : lines) height += l.height;
  height += gap * static_cast<int>(lines.size() - 1);

  ComposedLines out;
  out.image = Image(width, height, 1, 0);
  int y = 0;
  for (const auto& l : lines) {
    int x = 0;
    if (alignment == plan::Alignment::kCenter) x = (width - l.width) / 2;
    if (alignment == plan::Alignment::kRight) x = width - l.width;
    for (int yy = 0; yy < l.height; ++yy) {
      for (int xx = 0; xx < l.width; ++xx) out.image.at(x + xx, y + yy) = l.at(xx, yy);
    }
    out.x_offsets.push_back(x);
    out.y_offsets.push_back(y);
    y += l.height + gap;
  }
  return out;
}

Image rotate_canvas(const Image& img, double degrees, Interpolation interp) {
  double norm = std::fmod(degrees, 360.0);
  if (norm < 0) norm += 360.0;
  if (norm == 0.0 || img.empty()) return img;

  const int W = img.width, H = img.height, C = img.channels;
  if (norm == 90.0 || norm == 180.0 || norm == 270.0) {
    const bool swap = norm != 180.0;
    Image out(swap ? H : W, swap ? W : H, C);
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        int sx = 0, sy = 0;
        if (norm == 90.0) { sx = W - 1 - y; sy = x; }
        else if (norm == 180.0) { sx = W - 1 - x; sy = H - 1 - y; }
        else { sx = y; sy = H - 1 - x; }
        for (int c = 0; c < C; ++c) out.at(x, y, c) = img.at(sx, sy, c);
      }
    }
    return out;
  }

  const double rad = norm * std::numbers::pi / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  const int OW = static_cast<int>(std::ceil(std::abs(W * cs) + std::abs(H * sn) - 1e-9));
  const int OH = static_cast<int>(std::ceil(std::abs(W * sn) + std::abs(H * cs) - 1e-9));
  Image out(OW, OH, C, 0);

  if (interp == Interpolation::kNearest) {
    // Three integer shears on the pixel lattice: a permutation, so rotating
    // back by -degrees returns every pixel that stayed on the canvas.
    const bool flip = norm > 90.0 && norm < 270.0;
    double phi = flip ? norm - 180.0 : (norm > 180.0 ? norm - 360.0 : norm);
    phi *= std::numbers::pi / 180.0;
    const double a = -std::tan(phi / 2), b = std::sin(phi);
    const int icx = W / 2, icy = H / 2, ocx = OW / 2, ocy = OH / 2;
    for (int y = 0; y < OH; ++y) {
      for (int x = 0; x < OW; ++x) {
        long X = x - ocx, Y = y - ocy;
        X += std::lround(a * Y);
        Y += std::lround(b * X);
        X += std::lround(a * Y);
        if (flip) X = -X, Y = -Y;
        const long sx = X + icx, sy = Y + icy;
        if (sx < 0 || sy < 0 || sx >= W || sy >= H) continue;
        for (int c = 0; c < C; ++c) out.at(x, y, c) = img.at(static_cast<int>(sx), static_cast<int>(sy), c);
      }
    }
    return out;
  }

  const double icx = W / 2.0, icy = H / 2.0, ocx = OW / 2.0, ocy = OH / 2.0;
  for (int y = 0; y < OH; ++y) {
    for (int x = 0; x < OW; ++x) {
      const double dx = x + 0.5 - ocx, dy = y + 0.5 - ocy;
      const double sx = dx * cs - dy * sn + icx - 0.5;
      const double sy = dx * sn + dy * cs + icy - 0.5;
      const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      if (x0 < -1 || y0 < -1 || x0 >= W || y0 >= H) continue;
      for (int c = 0; c < C; ++c) {
        auto px = [&](int xx, int yy) -> double {
          return (xx < 0 || yy < 0 || xx >= W || yy >= H) ? 0.0 : img.at(xx, yy, c);
        };
        const double v = (1 - fx) * (1 - fy) * px(x0, y0) + fx * (1 - fy) * px(x0 + 1, y0) +
                         (1 - fx) * fy * px(x0, y0 + 1) + fx * fy * px(x0 + 1, y0 + 1);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Template orchestration

Rgb template_background(plan::ColorName color) {
  const Rgb c = plan::color_rgb(color);
  const int luma = (299 * c.r + 587 * c.g + 114 * c.b + 500) / 1000;
  return luma > 170 ? Rgb{0, 0, 0} : Rgb{255, 255, 255};
}

namespace {

struct Block {
  std::vector<std::string> lines;
  Image coverage;  // bilinear
  Image mask;      // nearest
  std::vector<std::string> warnings;
  int font_px = 0;
};

Block layout_block(const std::string& content, const plan::TextRegion& region, const plan::PixelRect& rect,
                   const RenderBackend& backend, const BitmapFont& font, const RenderOptions& options) {
  int size = std::max(options.min_font_px,
                      static_cast<int>(std::lround(region.font_size_ratio * rect.height())));
  for (;;) {
    const bool last_try = size <= options.min_font_px;
    LineStyle style{&font, size, region.font_weight};
    std::vector<std::string> lines;
    try {
      lines = break_lines(content, rect.width(),
                          [&](std::string_view l) { return backend.measure(l, style); });
    } catch (const ValidationError&) {
      if (last_try) throw;
      size = std::max(options.min_font_px, size - std::max(1, size / 10));
      continue;
    }
    Block b;
    b.font_px = size;
    std::vector<Image> rasters;
    for (const auto& l : lines) {
      auto r = render_line(l, style, backend);
      for (char32_t cp : r.missing) {
        std::string w = "missing glyph U+";
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04X", static_cast<unsigned>(cp));
        w += buf;
        w += " in font " + font.name() + " (tofu substituted)";
        if (std::find(b.warnings.begin(), b.warnings.end(), w) == b.warnings.end()) b.warnings.push_back(w);
      }
      rasters.push_back(std::move(r.coverage));
    }
    const auto composed = compose_lines(rasters, region.alignment);
    b.coverage = rotate_canvas(composed.image, region.rotation, Interpolation::kBilinear);
    b.mask = rotate_canvas(composed.image, region.rotation, Interpolation::kNearest);
    b.lines = std::move(lines);
    if ((b.coverage.width <= rect.width() && b.coverage.height <= rect.height()) || last_try) {
      if (last_try && (b.coverage.width > rect.width() || b.coverage.height > rect.height())) {
        b.warnings.push_back("content exceeds its box at the minimum font size; clipped");
      }
      return b;
    }
    size = std::max(options.min_font_px, size - std::max(1, size / 10));
  }
}

}  // namespace

GlyphTemplate render_template(const plan::TextRegion& region, int canvas_w, int canvas_h,
                              const FontRegistry& registry, const RenderOptions& options) {
  if (canvas_w < 1 || canvas_h < 1) throw DegenerateInputError("template canvas has no pixels");
  if (text::collapse_whitespace(region.content).empty()) throw ValidationError("empty content", "content");
  if (!region.bbox.valid()) throw ValidationError("invalid bbox", "bbox");

  GlyphTemplate t;
  t.region = region;
  t.rect = plan::bbox_to_pixels(region.bbox, canvas_w, canvas_h);
  t.is_math = region.is_latex || detect_math(region.content);
  const std::string content = t.is_math ? unicode_to_latex(region.content) : region.content;

  const BitmapFont& font = registry.resolve(region.font);
  PlainTextBackend plain;
  const BitmapFont* math_font = registry.contains("serif") ? &registry.resolve("serif") : nullptr;
  StructuredMathBackend structured(math_font);
  const bool use_structured = t.is_math && options.structured_math;
  t.fallback_used = t.is_math && !options.structured_math;
  const RenderBackend& backend = use_structured ? static_cast<const RenderBackend&>(structured) : plain;
  t.backend = std::string(backend.name());
  if (t.fallback_used) t.warnings.push_back("structured-math backend unavailable; rendered as plain text");

  Block block = layout_block(content, region, t.rect, backend, font, options);
  t.lines = block.lines;
  t.font_px = block.font_px;
  t.warnings.insert(t.warnings.end(), block.warnings.begin(), block.warnings.end());

  t.background = template_background(region.color);
  const Rgb ink = plan::color_rgb(region.color);
  t.image = Image::filled(canvas_w, canvas_h, t.background);
  t.mask = Image(canvas_w, canvas_h, 1, 0);

  int ox = t.rect.x0;
  if (region.alignment == plan::Alignment::kCenter) ox = t.rect.x0 + (t.rect.width() - block.coverage.width) / 2;
  if (region.alignment == plan::Alignment::kRight) ox = t.rect.x1 - block.coverage.width;
  const int oy = t.rect.y0 + (t.rect.height() - block.coverage.height) / 2;
  for (int y = 0; y < block.coverage.height; ++y) {
    for (int x = 0; x < block.coverage.width; ++x) {
      const int px = ox + x, py = oy + y;
      if (!t.rect.contains(px, py)) continue;
      const int a = block.coverage.at(x, y);
      if (a > 0) {
        auto mix = [a](std::uint8_t bg, std::uint8_t fg) {
          return static_cast<std::uint8_t>((bg * (255 - a) + fg * a + 127) / 255);
        };
        t.image.set_rgb(px, py, {mix(t.background.r, ink.r), mix(t.background.g, ink.g), mix(t.background.b, ink.b)});
      }
      if (block.mask.at(x, y) >= 128) t.mask.at(px, py) = 255;
    }
  }
  return t;
}

PlanTemplate render_plan(const plan::TypographyPlan& plan, int canvas_w, int canvas_h,
                         const FontRegistry& registry, const RenderOptions& options) {
  if (plan.text_regions.empty()) throw ValidationError("plan has no text regions", "text_regions");
  PlanTemplate out;
  bool all_light = true;
  for (const auto& r : plan.text_regions) {
    if (template_background(r.color) == Rgb{255, 255, 255}) all_light = false;
  }
  out.background = all_light ? Rgb{0, 0, 0} : Rgb{255, 255, 255};
  out.image = Image::filled(canvas_w, canvas_h, out.background);
  out.mask = Image(canvas_w, canvas_h, 1, 0);
  for (std::size_t i = 0; i < plan.text_regions.size(); ++i) {
    GlyphTemplate t;
    try {
      t = render_template(plan.text_regions[i], canvas_w, canvas_h, registry, options);
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), "text_regions[" + std::to_string(i) + "]");
    }
    const Rgb ink = plan::color_rgb(t.region.color);
    for (int y = t.rect.y0; y < t.rect.y1; ++y) {
      for (int x = t.rect.x0; x < t.rect.x1; ++x) {
        const Rgb src = t.image.rgb(x, y);
        if (src == t.background) continue;
        // re-blend against the shared background using the coverage implied by the source pixel
        auto channel_alpha = [](int bg, int fg, int v) { return fg == bg ? -1 : (v - bg) * 255 / (fg - bg); };
        int a = channel_alpha(t.background.r, ink.r, src.r);
        if (a < 0) a = channel_alpha(t.background.g, ink.g, src.g);
        if (a < 0) a = channel_alpha(t.background.b, ink.b, src.b);
        a = std::clamp(a < 0 ? 255 : a, 0, 255);
        auto mix = [a](int bg, int fg) { return static_cast<std::uint8_t>((bg * (255 - a) + fg * a + 127) / 255); };
        out.image.set_rgb(x, y, {mix(out.background.r, ink.r), mix(out.background.g, ink.g), mix(out.background.b, ink.b)});
      }
    }
    for (std::size_t p = 0; p < out.mask.data.size(); ++p) out.mask.data[p] |= t.mask.data[p];
    out.regions.push_back(std::move(t));
  }
  return out;
}

}  // namespace glyphforge::render
