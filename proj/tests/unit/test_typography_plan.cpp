#include <gtest/gtest.h>

#include <random>
#include <set>

#include "glyphforge/errors.hpp"
#include "glyphforge/typography_plan.hpp"

using namespace glyphforge;
using namespace glyphforge::plan;

namespace {

std::string region_json(const std::string& bbox, const std::string& ratio = "0.8") {
  return R"({"image_analysis": {"background_style": "plain white", "dominant_colors": ["#FFFFFF"],
             "text_style_hint": "bold sans"},
             "text_regions": [{"content": "HELLO", "bbox": )" +
         bbox + R"(, "font": "auto", "font_weight": "bold", "font_size_ratio": )" + ratio +
         R"(, "color": "black", "is_latex": false, "alignment": "center", "rotation": 0}]})";
}

std::string path_of(const std::string& json) {
  try {
    parse_plan(json);
  } catch (const ValidationError& e) {
    return e.path() + " | " + e.what();
  }
  return "<no error>";
}

// Grid-sampled area oracle, independent of the closed-form min/max arithmetic.
double iou_oracle(const BBox& a, const BBox& b) {
  constexpr int kN = 400;
  long inter = 0, uni = 0;
  for (int i = 0; i < kN; ++i) {
    for (int j = 0; j < kN; ++j) {
      const double x = (i + 0.5) / kN, y = (j + 0.5) / kN;
      const bool ina = x >= a.x_min && x < a.x_max && y >= a.y_min && y < a.y_max;
      const bool inb = x >= b.x_min && x < b.x_max && y >= b.y_min && y < b.y_max;
      inter += ina && inb;
      uni += ina || inb;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

BBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  if (a == b) b = std::min(1.0, a + 0.01);
  if (c == d) d = std::min(1.0, c + 0.01);
  return {std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)};
}

TypographyPlan random_plan(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TypographyPlan p;
  p.image_analysis.background_style = "style " + std::to_string(rng() % 100);
  p.image_analysis.dominant_colors = {"#1A2B3C", "#ffffff"};
  p.image_analysis.text_style_hint = "hint \"quoted\" \xCE\xB1";
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n; ++i) {
    TextRegion r;
    r.content = i % 2 ? "E=mc\xC2\xB2" : "Region " + std::to_string(rng() % 1000);
    r.bbox = random_box(rng);
    r.font = i % 2 ? "serif" : "auto";
    r.font_weight = static_cast<FontWeight>(rng() % 3);
    r.font_size_ratio = 0.1 + 0.9 * u(rng);
    r.color = static_cast<ColorName>(rng() % 13);
    r.is_latex = rng() % 2;
    r.alignment = static_cast<Alignment>(rng() % 3);
    r.rotation = -179.999 + 359.999 * u(rng);
    p.text_regions.push_back(r);
  }
  return p;
}

}  // namespace

TEST(ParsePlan, MinimalValidPlan) {
  const auto p = parse_plan(region_json("[0.1,0.1,0.9,0.3]"));
  ASSERT_EQ(p.text_regions.size(), 1u);
  EXPECT_EQ(p.text_regions[0].bbox, (BBox{0.1, 0.1, 0.9, 0.3}));
  EXPECT_EQ(p.text_regions[0].font_weight, FontWeight::kBold);
}

TEST(ParsePlan, FontSizeRatioOutOfRangeNamesPath) {
  try {
    parse_plan(region_json("[0.1,0.1,0.9,0.3]", "1.5"));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "text_regions[0].font_size_ratio");
  }
}

TEST(ParsePlan, InvertedBboxIsGeometryError) {
  const auto got = path_of(region_json("[0.5,0.1,0.4,0.3]"));
  EXPECT_NE(got.find("text_regions[0].bbox"), std::string::npos) << got;
  EXPECT_NE(got.find("geometry error: x_min >= x_max"), std::string::npos) << got;
}

TEST(ParsePlan, StrictSchema) {
  EXPECT_NE(path_of("{not json").find("malformed JSON"), std::string::npos);
  auto extra = region_json("[0.1,0.1,0.9,0.3]");
  extra.insert(extra.rfind("\"rotation\""), "\"shadow\": true, ");
  EXPECT_EQ(path_of(extra).substr(0, path_of(extra).find(" |")), "text_regions[0].shadow");
  auto missing = region_json("[0.1,0.1,0.9,0.3]");
  missing.replace(missing.find("\"is_latex\": false, "), 19, "");
  EXPECT_EQ(path_of(missing).substr(0, path_of(missing).find(" |")), "text_regions[0].is_latex");
  auto bad_color = region_json("[0.1,0.1,0.9,0.3]");
  bad_color.replace(bad_color.find("\"black\""), 7, "\"teal\"");
  EXPECT_NE(path_of(bad_color).find("text_regions[0].color"), std::string::npos);
  auto bad_hex = region_json("[0.1,0.1,0.9,0.3]");
  bad_hex.replace(bad_hex.find("#FFFFFF"), 7, "#FFFFF");
  EXPECT_NE(path_of(bad_hex).find("image_analysis.dominant_colors[0]"), std::string::npos);
  EXPECT_NE(path_of(region_json("[0.1,0.1,1.2,0.3]")).find("text_regions[0].bbox[2]"), std::string::npos);
}

TEST(ParsePlan, RotationRangeIsHalfOpen) {
  auto at = [](const char* rot) {
    auto j = region_json("[0.1,0.1,0.9,0.3]");
    j.replace(j.find("\"rotation\": 0"), 13, std::string("\"rotation\": ") + rot);
    return j;
  };
  EXPECT_NO_THROW(parse_plan(at("180")));
  EXPECT_THROW(parse_plan(at("-180")), ValidationError);
}

TEST(ParsePlan, RoundTripProperty) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_plan(rng);
    EXPECT_EQ(parse_plan(serialize_plan(p)), p);
    EXPECT_EQ(parse_plan(serialize_plan(p, -1)), p);
    EXPECT_NO_THROW(validate(p));
  }
}

TEST(Colors, ThirteenNamesRoundTrip) {
  std::set<std::string> seen;
  for (auto c : all_colors()) {
    seen.insert(std::string(to_string(c)));
    EXPECT_EQ(color_from_string(to_string(c)), c);
  }
  EXPECT_EQ(seen.size(), 13u);
}

TEST(BboxIou, Examples) {
  const BBox a{0, 0, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(bbox_iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(bbox_iou(a, {0.6, 0.6, 1, 1}), 0.0);
  // inter 0.0625 / union 0.4375
  EXPECT_NEAR(bbox_iou(a, {0.25, 0.25, 0.75, 0.75}), 0.0625 / 0.4375, 1e-12);
  EXPECT_NEAR(bbox_iou(a, {0.25, 0.25, 0.75, 0.75}), iou_oracle(a, {0.25, 0.25, 0.75, 0.75}), 1e-9);
}

TEST(BboxIou, SymmetryBoundsAndOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const BBox a = random_box(rng), b = random_box(rng);
    const double v = bbox_iou(a, b);
    EXPECT_EQ(v, bbox_iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    if (v == 1.0) EXPECT_EQ(a, b);
    if (i < 40) EXPECT_NEAR(v, iou_oracle(a, b), 0.02);
  }
}

TEST(BboxToPixels, Examples) {
  EXPECT_EQ(bbox_to_pixels({0, 0, 1, 1}, 64, 64), (PixelRect{0, 0, 64, 64}));
  EXPECT_EQ(bbox_to_pixels({0.25, 0.25, 0.75, 0.75}, 8, 8), (PixelRect{2, 2, 6, 6}));
  EXPECT_EQ(bbox_to_pixels({0.0, 0.0, 0.001, 0.001}, 4, 4), (PixelRect{0, 0, 1, 1}));
}

TEST(BboxToPixels, NeverEmptyAndInsideImage) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const BBox b = random_box(rng);
    const int w = 1 + static_cast<int>(rng() % 200), h = 1 + static_cast<int>(rng() % 200);
    const auto r = bbox_to_pixels(b, w, h);
    EXPECT_GE(r.width(), 1);
    EXPECT_GE(r.height(), 1);
    EXPECT_GE(r.x0, 0);
    EXPECT_GE(r.y0, 0);
    EXPECT_LE(r.x1, w);
    EXPECT_LE(r.y1, h);
  }
}

TEST(OverlayGrid, ColumnsAtRoundedFractions) {
  const Image img = Image::filled(100, 100, {255, 255, 255});
  const Image out = overlay_grid(img, 5);
  std::vector<int> full;
  for (int x = 0; x < 100; ++x) {
    bool all = true;
    for (int y = 0; y < 100; ++y) all = all && out.rgb(x, y) == kGridColor;
    if (all) full.push_back(x);
  }
  std::vector<int> oracle;
  for (int k = 0; k <= 5; ++k) oracle.push_back(std::min(static_cast<int>(k / 5.0 * 100 + 0.5), 99));
  EXPECT_EQ(full, oracle);
  EXPECT_EQ(full, (std::vector<int>{0, 20, 40, 60, 80, 99}));
  EXPECT_EQ(img, Image::filled(100, 100, {255, 255, 255}));  // source untouched
}

TEST(OverlayGrid, FencepostAndErrors) {
  EXPECT_EQ(grid_line_positions(64, 2).size(), 3u);
  // interior lines sit where bbox_to_pixels puts an edge at k/n
  for (int k = 1; k < 5; ++k) EXPECT_EQ(grid_line_positions(100, 5)[k], bbox_to_pixels({k / 5.0, 0, 1, 1}, 100, 100).x0);
  EXPECT_THROW(overlay_grid(Image::filled(10, 10, {0, 0, 0}), 1), ValidationError);
  EXPECT_THROW(overlay_grid(Image{}, 5), DegenerateInputError);
}

TEST(OverlayGrid, DimensionsKeptAndStrippingBound) {
  for (int n : {2, 3, 5, 8}) {
    for (auto [w, h] : {std::pair{100, 100}, std::pair{256, 128}, std::pair{512, 512}}) {
      const Image img = Image::filled(w, h, {40, 90, 160});
      const Image out = overlay_grid(img, n);
      ASSERT_EQ(out.width, w);
      ASSERT_EQ(out.height, h);
      std::size_t kept = 0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) kept += out.rgb(x, y) != kGridColor;
      const double bound = 1.0 - 2.0 * (n + 1) * (w + h) / (static_cast<double>(w) * h);
      EXPECT_GE(static_cast<double>(kept) / (w * h), bound) << n << " " << w << "x" << h;
    }
  }
}
