#include "glyphforge/typography_plan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <regex>
#include <set>

#include "glyphforge/errors.hpp"
#include "glyphforge/font.hpp"

namespace glyphforge::plan {

using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, 13> kColorNames = {
    "white", "black", "red", "blue", "green", "yellow", "orange",
    "brown", "gray", "gold", "silver", "purple", "pink"};

constexpr std::array<Rgb, 13> kColorValues = {{
    {255, 255, 255}, {0, 0, 0}, {220, 30, 30}, {30, 60, 200}, {30, 150, 50},
    {240, 210, 40}, {240, 140, 20}, {120, 70, 30}, {128, 128, 128},
    {212, 175, 55}, {192, 192, 192}, {130, 50, 160}, {240, 130, 170}}};

// Keeps the current field path for error messages.
class Walker {
 public:
  explicit Walker(std::string path) : path_(std::move(path)) {}

  Walker field(std::string_view name) const {
    return Walker(path_.empty() ? std::string(name) : path_ + "." + std::string(name));
  }
  Walker index(std::size_t i) const { return Walker(path_ + "[" + std::to_string(i) + "]"); }

  [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(msg, path_); }

  const json& object_member(const json& obj, std::string_view name) const {
    const auto it = obj.find(std::string(name));
    if (it == obj.end()) field(name).fail("missing field");
    return *it;
  }

  void expect_keys(const json& obj, std::initializer_list<std::string_view> keys) const {
    if (!obj.is_object()) fail("expected an object");
    for (const auto& [k, _] : obj.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) field(k).fail("unknown field");
    }
    for (auto k : keys) object_member(obj, k);
  }

  std::string string(const json& v) const {
    if (!v.is_string()) fail("expected a string");
    return v.get<std::string>();
  }
  double number(const json& v) const {
    if (!v.is_number()) fail("expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("non-finite number");
    return d;
  }
  bool boolean(const json& v) const {
    if (!v.is_boolean()) fail("expected a boolean");
    return v.get<bool>();
  }

 private:
  std::string path_;
};

BBox parse_bbox(const json& v, const Walker& w) {
  if (!v.is_array() || v.size() != 4) w.fail("expected [x_min, y_min, x_max, y_max]");
  std::array<double, 4> c{};
  for (std::size_t i = 0; i < 4; ++i) {
    c[i] = w.index(i).number(v[i]);
    if (c[i] < 0.0 || c[i] > 1.0) w.index(i).fail("coordinate outside [0,1]");
  }
  BBox b{c[0], c[1], c[2], c[3]};
  if (b.x_min >= b.x_max) w.fail("geometry error: x_min >= x_max");
  if (b.y_min >= b.y_max) w.fail("geometry error: y_min >= y_max");
  return b;
}

TextRegion parse_region(const json& v, const Walker& w) {
  w.expect_keys(v, {"content", "bbox", "font", "font_weight", "font_size_ratio", "color",
                    "is_latex", "alignment", "rotation"});
  TextRegion r;
  r.content = w.field("content").string(v["content"]);
  r.bbox = parse_bbox(v["bbox"], w.field("bbox"));
  r.font = w.field("font").string(v["font"]);
  if (r.font.empty()) w.field("font").fail("empty font id");

  const auto weight = font_weight_from_string(w.field("font_weight").string(v["font_weight"]));
  if (!weight) w.field("font_weight").fail("expected light/regular/bold");
  r.font_weight = *weight;

  r.font_size_ratio = w.field("font_size_ratio").number(v["font_size_ratio"]);
  if (r.font_size_ratio < 0.1 || r.font_size_ratio > 1.0) {
    w.field("font_size_ratio").fail("out of range [0.1, 1.0]");
  }

  const auto color = color_from_string(w.field("color").string(v["color"]));
  if (!color) w.field("color").fail("unknown color name");
  r.color = *color;

  r.is_latex = w.field("is_latex").boolean(v["is_latex"]);

  const auto align = alignment_from_string(w.field("alignment").string(v["alignment"]));
  if (!align) w.field("alignment").fail("expected left/center/right");
  r.alignment = *align;

  r.rotation = w.field("rotation").number(v["rotation"]);
  if (!(r.rotation > -180.0 && r.rotation <= 180.0)) w.field("rotation").fail("out of range (-180, 180]");
  return r;
}

bool is_hex_color(const std::string& s) {
  static const std::regex kHex("^#[0-9A-Fa-f]{6}$");
  return std::regex_match(s, kHex);
}

ImageAnalysis parse_analysis(const json& v, const Walker& w) {
  w.expect_keys(v, {"background_style", "dominant_colors", "text_style_hint"});
  ImageAnalysis a;
  a.background_style = w.field("background_style").string(v["background_style"]);
  a.text_style_hint = w.field("text_style_hint").string(v["text_style_hint"]);
  const auto& colors = v["dominant_colors"];
  const auto cw = w.field("dominant_colors");
  if (!colors.is_array()) cw.fail("expected an array");
  for (std::size_t i = 0; i < colors.size(); ++i) {
    auto c = cw.index(i).string(colors[i]);
    if (!is_hex_color(c)) cw.index(i).fail("expected #RRGGBB");
    a.dominant_colors.push_back(std::move(c));
  }
  return a;
}

}  // namespace

bool BBox::valid() const noexcept {
  return x_min >= 0.0 && y_min >= 0.0 && x_max <= 1.0 && y_max <= 1.0 && x_min < x_max &&
         y_min < y_max;
}

std::string_view to_string(FontWeight w) {
  switch (w) {
    case FontWeight::kLight: return "light";
    case FontWeight::kRegular: return "regular";
    case FontWeight::kBold: return "bold";
  }
  return "regular";
}

std::string_view to_string(Alignment a) {
  switch (a) {
    case Alignment::kLeft: return "left";
    case Alignment::kCenter: return "center";
    case Alignment::kRight: return "right";
  }
  return "center";
}

std::string_view to_string(ColorName c) { return kColorNames[static_cast<std::size_t>(c)]; }

std::optional<FontWeight> font_weight_from_string(std::string_view s) {
  if (s == "light") return FontWeight::kLight;
  if (s == "regular") return FontWeight::kRegular;
  if (s == "bold") return FontWeight::kBold;
  return std::nullopt;
}

std::optional<Alignment> alignment_from_string(std::string_view s) {
  if (s == "left") return Alignment::kLeft;
  if (s == "center") return Alignment::kCenter;
  if (s == "right") return Alignment::kRight;
  return std::nullopt;
}

std::optional<ColorName> color_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kColorNames.size(); ++i) {
    if (kColorNames[i] == s) return static_cast<ColorName>(i);
  }
  return std::nullopt;
}

Rgb color_rgb(ColorName c) { return kColorValues[static_cast<std::size_t>(c)]; }

const std::array<ColorName, 13>& all_colors() {
  static const std::array<ColorName, 13> colors = [] {
    std::array<ColorName, 13> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<ColorName>(i);
    return out;
  }();
  return colors;
}

TypographyPlan parse_plan(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end(), nullptr, true, /*ignore_comments=*/false);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  const Walker root("");
  root.expect_keys(doc, {"image_analysis", "text_regions"});
  TypographyPlan plan;
  plan.image_analysis = parse_analysis(doc["image_analysis"], root.field("image_analysis"));
  const auto& regions = doc["text_regions"];
  const auto rw = root.field("text_regions");
  if (!regions.is_array()) rw.fail("expected an array");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    plan.text_regions.push_back(parse_region(regions[i], rw.index(i)));
  }
  return plan;
}

std::string serialize_plan(const TypographyPlan& plan, int indent) {
  json regions = json::array();
  for (const auto& r : plan.text_regions) {
    regions.push_back(json{{"content", r.content},
                           {"bbox", {r.bbox.x_min, r.bbox.y_min, r.bbox.x_max, r.bbox.y_max}},
                           {"font", r.font},
                           {"font_weight", to_string(r.font_weight)},
                           {"font_size_ratio", r.font_size_ratio},
                           {"color", to_string(r.color)},
                           {"is_latex", r.is_latex},
                           {"alignment", to_string(r.alignment)},
                           {"rotation", r.rotation}});
  }
  const json doc{{"image_analysis",
                  {{"background_style", plan.image_analysis.background_style},
                   {"dominant_colors", plan.image_analysis.dominant_colors},
                   {"text_style_hint", plan.image_analysis.text_style_hint}}},
                 {"text_regions", regions}};
  return doc.dump(indent);
}

void validate(const TypographyPlan& plan) { parse_plan(serialize_plan(plan, -1)); }

double bbox_iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

PixelRect bbox_to_pixels(const BBox& b, int width, int height) {
  // The epsilon absorbs representation error such as 0.3 * 10 = 3.0000000000000004.
  constexpr double kEps = 1e-9;
  auto lo = [](double v, int extent) {
    return std::clamp(static_cast<int>(std::floor(v * extent + kEps)), 0, extent - 1);
  };
  auto hi = [](double v, int extent) {
    return std::clamp(static_cast<int>(std::ceil(v * extent - kEps)), 0, extent);
  };
  PixelRect r{lo(b.x_min, width), lo(b.y_min, height), hi(b.x_max, width), hi(b.y_max, height)};
  r.x1 = std::max(r.x1, r.x0 + 1);
  r.y1 = std::max(r.y1, r.y0 + 1);
  return r;
}

std::vector<int> grid_line_positions(int extent, int n) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    out.push_back(std::min(static_cast<int>(std::lround(static_cast<double>(k) / n * extent)), extent - 1));
  }
  return out;
}

Image overlay_grid(const Image& image, int n) {
  if (n < 2) throw ValidationError("grid density must be >= 2");
  if (image.empty()) throw DegenerateInputError("cannot overlay a grid on an empty image");
  Image out = to_rgb(image);
  const auto xs = grid_line_positions(out.width, n);
  const auto ys = grid_line_positions(out.height, n);
  for (int x : xs) {
    for (int y = 0; y < out.height; ++y) out.set_rgb(x, y, kGridColor);
  }
  for (int y : ys) {
    for (int x = 0; x < out.width; ++x) out.set_rgb(x, y, kGridColor);
  }

  // Labels only when a label fits inside one grid cell.
  const auto& font = render::builtin_font();
  const int label_px = std::max(8, std::min(out.width, out.height) / 32);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.3f", 0.0);
  const int label_w = font.measure(buf, label_px);
  const int cell_w = out.width / n;
  const int cell_h = out.height / n;
  if (label_w + 2 > cell_w || label_px + 2 > cell_h) return out;

  auto stamp = [&](const std::string& label, int x0, int y0) {
    const Image cov = font.render(label, label_px);
    for (int y = 0; y < cov.height; ++y) {
      for (int x = 0; x < cov.width; ++x) {
        const int px = x0 + x, py = y0 + y;
        if (cov.at(x, y) >= 128 && px >= 0 && py >= 0 && px < out.width && py < out.height) {
          out.set_rgb(px, py, kGridColor);
        }
      }
    }
  };
  for (int k = 0; k <= n; ++k) {
    std::snprintf(buf, sizeof(buf), "%.3f", static_cast<double>(k) / n);
    const int x = std::min(xs[k] + 2, out.width - label_w);
    stamp(buf, x, 2);
    const int y = std::min(ys[k] + 2, out.height - label_px);
    if (k > 0) stamp(buf, 2, y);
  }
  return out;
}

}  // namespace glyphforge::plan
