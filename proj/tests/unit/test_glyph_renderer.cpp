#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "glyphforge/errors.hpp"
#include "glyphforge/glyph_renderer.hpp"
#include "glyphforge/text.hpp"

using namespace glyphforge;
using namespace glyphforge::render;

namespace {

int ink(const Image& img) {
  int n = 0;
  for (auto v : img.data) n += v >= 128;
  return n;
}

plan::TextRegion region(std::string content, plan::BBox bbox = {0, 0, 1, 1}) {
  plan::TextRegion r;
  r.content = std::move(content);
  r.bbox = bbox;
  return r;
}

MeasureFn mono10() {
  return [](std::string_view s) { return 10 * static_cast<int>(text::codepoint_count(s)); };
}

plan::TextRegion random_region(std::mt19937_64& rng) {
  static const char* kWords[] = {"GLYPH", "mango", "E=mc\xC2\xB2", "open", "\xCE\xB1+\xCE\xB2", "x\xC2\xB2+y\xC2\xB2",
                                 "SALE", "50%", "caf\xC3\xA9", "tokens", "WIDE-WORD-WITHOUT-SPACES"};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  plan::TextRegion r;
  const int words = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < words; ++i) {
    if (i) r.content += ' ';
    r.content += kWords[rng() % std::size(kWords)];
  }
  const double x0 = 0.6 * u(rng), y0 = 0.6 * u(rng);
  r.bbox = {x0, y0, x0 + 0.15 + 0.25 * u(rng), y0 + 0.1 + 0.3 * u(rng)};
  r.font = rng() % 2 ? "serif" : "auto";
  r.font_weight = static_cast<plan::FontWeight>(rng() % 3);
  r.font_size_ratio = 0.1 + 0.9 * u(rng);
  r.color = static_cast<plan::ColorName>(rng() % 13);
  r.alignment = static_cast<plan::Alignment>(rng() % 3);
  r.rotation = (rng() % 4 == 0) ? 0.0 : -170.0 + 340.0 * u(rng);
  return r;
}

}  // namespace

TEST(DetectMath, Examples) {
  EXPECT_TRUE(detect_math("E=mc\xC2\xB2"));
  EXPECT_FALSE(detect_math("Hello World"));
  EXPECT_TRUE(detect_math("\\frac{a}{b}"));
  EXPECT_FALSE(detect_math("="));  // marker but a single symbol
  EXPECT_TRUE(detect_math("\xCE\xB1\xCE\xB2"));
}

TEST(UnicodeToLatex, Examples) {
  EXPECT_EQ(unicode_to_latex("E=mc\xC2\xB2"), "E=mc^{2}");
  EXPECT_EQ(unicode_to_latex("abc"), "abc");
  EXPECT_EQ(unicode_to_latex("\xCE\xB1+\xCE\xB2"), "\\alpha+\\beta");
  EXPECT_EQ(unicode_to_latex("x\xC2\xB2\xC2\xB3"), "x^{23}");
  EXPECT_EQ(unicode_to_latex("\xCE\xB1x"), "\\alpha x");
}

TEST(UnicodeToLatex, TableLookupOracle) {
  // Every table symbol in isolation maps to exactly its TSV entry.
  const auto tsv = std::string("\xC3\x97\t\\times\n\xE2\x88\x9E\t\\infty\n");
  const auto t = LatexTable::parse_tsv(tsv);
  EXPECT_EQ(unicode_to_latex("a\xC3\x97" "b", t), "a\\times b");
  EXPECT_EQ(unicode_to_latex("\xE2\x88\x9E", t), "\\infty");
  EXPECT_EQ(t.from_command("\\times"), U'×');
}

TEST(UnicodeToLatex, Idempotent) {
  std::mt19937_64 rng(5);
  const std::u32string alphabet = U"abx =+-()²³₁₂αβπΣ∞×÷±≤≥≠√∑∏∫ ";
  for (int i = 0; i < 500; ++i) {
    std::u32string s;
    const int n = static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) s += alphabet[rng() % alphabet.size()];
    const auto once = unicode_to_latex(text::encode_utf8(s));
    EXPECT_EQ(unicode_to_latex(once), once) << once;
  }
}

TEST(BreakLines, Examples) {
  EXPECT_EQ(break_lines("hi", 100, mono10()), (std::vector<std::string>{"hi"}));
  // 4*10 <= 45 < 9*10
  EXPECT_EQ(break_lines("aaaa bbbb", 45, mono10()), (std::vector<std::string>{"aaaa", "bbbb"}));
  EXPECT_EQ(break_lines("aaaaaaaaaa", 45, mono10()), (std::vector<std::string>{"aaaa", "aaaa", "aa"}));
  EXPECT_THROW(break_lines("a", 5, mono10()), ValidationError);
}

TEST(BreakLines, WidthBoundAndReassembly) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    std::string s;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int k = 0; k < n; ++k) s += (rng() % 5 == 0) ? ' ' : static_cast<char>('a' + rng() % 3);
    if (text::collapse_whitespace(s).empty()) continue;
    const int box = 10 + static_cast<int>(rng() % 80);
    const auto lines = break_lines(s, box, mono10());
    std::string joined;
    for (const auto& l : lines) {
      EXPECT_LE(10 * static_cast<int>(l.size()), box);
      EXPECT_FALSE(l.empty());
      joined += l;
    }
    // concatenation without the restored spaces equals the input without spaces
    std::string bare;
    for (char c : s) if (c != ' ') bare += c;
    std::string joined_bare;
    for (char c : joined) if (c != ' ') joined_bare += c;
    EXPECT_EQ(joined_bare, bare);
  }
}

TEST(RenderLine, MetricsAndDeterminism) {
  const auto f = BitmapFont::block_font(10, 8, 2);
  PlainTextBackend plain;
  LineStyle st{&f, 10, plan::FontWeight::kRegular};
  const auto a = render_line("AB", st, plain);
  EXPECT_EQ(a.coverage.width, 20);
  EXPECT_EQ(render_line("AB", st, plain).coverage, a.coverage);
  EXPECT_THROW(render_line("", st, plain), DegenerateInputError);
  st.weight = plan::FontWeight::kBold;
  EXPECT_GT(ink(render_line("AB", st, plain).coverage), ink(a.coverage));
}

TEST(RenderLine, StructuredMathScripts) {
  StructuredMathBackend math;
  LineStyle st{&builtin_font(), 20, plan::FontWeight::kRegular};
  // "mc^{2}" lays out as m, c at 20px and 2 at 12px
  const int w = math.measure("mc^{2}", st);
  EXPECT_EQ(w, builtin_font().advance(U'm', 20) + builtin_font().advance(U'c', 20) +
                   builtin_font().advance(U'2', 12));
  EXPECT_EQ(math.measure("\\frac{a}{b}", st), builtin_font().measure(std::string_view("a/b"), 20));
  EXPECT_GT(ink(render_line("E=mc^{2}", st, math).coverage), 0);
}

TEST(ComposeLines, Examples) {
  const Image one(20, 10, 1, 255);
  const Image two(40, 10, 1, 255);
  const std::vector<Image> single{one};
  EXPECT_EQ(compose_lines(single, plan::Alignment::kLeft).image, one);
  const std::vector<Image> pair{one, two};
  const auto c = compose_lines(pair, plan::Alignment::kCenter);
  EXPECT_EQ(c.x_offsets[0], 10);
  EXPECT_EQ(c.image.width, 40);
  EXPECT_EQ(c.image.height, 10 + 2 + 10);  // gap = 0.2 * 10
  EXPECT_EQ(compose_lines(pair, plan::Alignment::kRight).x_offsets[0], 20);
  EXPECT_THROW(compose_lines(std::span<const Image>{}, plan::Alignment::kLeft), ValidationError);
}

TEST(RotateCanvas, Examples) {
  Image img(7, 3, 1, 0);
  img.at(1, 2) = 255;
  EXPECT_EQ(rotate_canvas(img, 0.0), img);
  const auto r90 = rotate_canvas(img, 90.0);
  EXPECT_EQ(r90.width, 3);
  EXPECT_EQ(r90.height, 7);
  const auto r45 = rotate_canvas(Image(10, 10, 1, 255), 45.0);
  const int oracle = static_cast<int>(std::ceil(10 * std::sqrt(2.0)));
  EXPECT_EQ(oracle, 15);
  EXPECT_EQ(r45.width, oracle);
  EXPECT_EQ(r45.height, oracle);
}

TEST(RotateCanvas, RightAnglesAreExactInverses) {
  std::mt19937_64 rng(9);
  Image img(13, 6, 1, 0);
  for (auto& v : img.data) v = rng() % 3 == 0 ? 255 : 0;
  for (double d : {90.0, 180.0, 270.0}) {
    const auto back = rotate_canvas(rotate_canvas(img, d), -d);
    EXPECT_EQ(back, img) << d;
  }
  // 90 ccw moves the top-right corner to the top-left
  Image dot(4, 2, 1, 0);
  dot.at(3, 0) = 255;
  EXPECT_EQ(rotate_canvas(dot, 90.0).at(0, 0), 255);
}

TEST(RotateCanvas, ArbitraryAngleKeepsForegroundWithinTwoPercent) {
  const auto& f = builtin_font();
  const Image line = f.render(std::string_view("GLYPH FORGE"), 40);
  for (double d : {17.0, 33.0, 45.0, 120.0, -60.0}) {
    const auto back = rotate_canvas(rotate_canvas(line, d, Interpolation::kNearest), -d, Interpolation::kNearest);
    const double a = ink(line), b = ink(back);
    EXPECT_LE(std::abs(a - b) / a, 0.02) << d;
  }
}

TEST(RenderTemplate, HiOnFullCanvas) {
  const auto reg = FontRegistry::builtin();
  const auto t = render_template(region("HI"), 64, 64, reg);
  EXPECT_EQ(t.image.width, t.mask.width);
  EXPECT_EQ(t.image.height, t.mask.height);
  EXPECT_GT(ink(t.mask), 0);
  EXPECT_FALSE(t.is_math);
  EXPECT_EQ(t.lines, (std::vector<std::string>{"HI"}));
  EXPECT_THROW(render_template(region(""), 64, 64, reg), ValidationError);
}

TEST(RenderTemplate, ForcedFallback) {
  const auto reg = FontRegistry::builtin();
  RenderOptions opt;
  opt.structured_math = false;
  const auto t = render_template(region("E=mc\xC2\xB2", {0, 0, 1, 0.5}), 128, 64, reg, opt);
  EXPECT_TRUE(t.is_math);
  EXPECT_TRUE(t.fallback_used);
  EXPECT_EQ(t.backend, "plain-text");
  EXPECT_EQ(t.lines, (std::vector<std::string>{"E=mc^{2}"}));
  const auto s = render_template(region("E=mc\xC2\xB2", {0, 0, 1, 0.5}), 128, 64, reg);
  EXPECT_FALSE(s.fallback_used);
  EXPECT_EQ(s.backend, "structured-math");
}

TEST(RenderTemplate, LightGlyphsGetDarkBackground) {
  EXPECT_EQ(template_background(plan::ColorName::kWhite), (Rgb{0, 0, 0}));
  EXPECT_EQ(template_background(plan::ColorName::kBlack), (Rgb{255, 255, 255}));
}

TEST(RenderTemplate, RandomRegionsDeterministicContainedAndWidthBounded) {
  const auto reg = FontRegistry::builtin();
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 50; ++i) {
    const auto r = random_region(rng);
    const auto a = render_template(r, 160, 120, reg);
    const auto b = render_template(r, 160, 120, reg);
    ASSERT_EQ(a, b) << r.content;
    for (int y = 0; y < a.mask.height; ++y)
      for (int x = 0; x < a.mask.width; ++x)
        if (a.mask.at(x, y)) ASSERT_TRUE(a.rect.contains(x, y)) << r.content;
    const BitmapFont& f = reg.resolve(r.font);
    StructuredMathBackend math(&reg.resolve("serif"));
    PlainTextBackend plain;
    const RenderBackend& be = a.is_math ? static_cast<const RenderBackend&>(math) : plain;
    for (const auto& l : a.lines) {
      EXPECT_LE(be.measure(l, {&f, a.font_px, r.font_weight}), a.rect.width()) << l;
    }
  }
}

TEST(RenderPlan, ErrorsCarryRegionIndex) {
  plan::TypographyPlan p;
  p.text_regions = {region("OK", {0, 0, 0.5, 0.5}), region("  ", {0.5, 0.5, 1, 1})};
  try {
    render_plan(p, 64, 64, FontRegistry::builtin());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "text_regions[1]");
  }
}

TEST(RenderPlan, MaskIsUnionOfRegions) {
  plan::TypographyPlan p;
  p.text_regions = {region("AB", {0, 0, 0.5, 0.5}), region("CD", {0.5, 0.5, 1, 1})};
  const auto reg = FontRegistry::builtin();
  const auto all = render_plan(p, 96, 96, reg);
  const auto a = render_template(p.text_regions[0], 96, 96, reg);
  const auto b = render_template(p.text_regions[1], 96, 96, reg);
  for (std::size_t i = 0; i < all.mask.data.size(); ++i) {
    EXPECT_EQ(all.mask.data[i] != 0, a.mask.data[i] != 0 || b.mask.data[i] != 0);
  }
}
