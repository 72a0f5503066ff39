// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "glyphforge/bench.hpp"
#include "glyphforge/diffusion.hpp"
#include "glyphforge/errors.hpp"
#include "glyphforge/glyph_renderer.hpp"
#include "glyphforge/injection.hpp"
#include "glyphforge/metrics.hpp"
#include "glyphforge/refinement.hpp"
#include "glyphforge/segmentation.hpp"

using namespace glyphforge;
using diffusion::LatentGrid;
using diffusion::Matrix;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail = "") {
  std::printf("%s %2d: %s%s%s\n", ok ? "PASS" : "FAIL", n, what.c_str(), detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void run(int n, const std::string& what, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(n, ok, what, detail);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

LatentGrid random_latent(int h, int w, int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  LatentGrid z(h, w, d);
  for (auto& v : z.values) v = u(rng);
  return z;
}

seg::TokenMask random_mask(int h, int w, std::mt19937_64& rng) {
  seg::TokenMask m{h, w, 0.25, std::vector<std::uint8_t>(static_cast<std::size_t>(h) * w)};
  for (auto& b : m.covered) b = rng() % 2;
  return m;
}

int mirror(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
  return i;
}

// Direct 2-D Gaussian low-pass at one cell.
double lf_at(const LatentGrid& z, int r, int c, int k, double sigma) {
  const int rad = static_cast<int>(std::ceil(3 * sigma));
  double norm = 0;
  for (int i = -rad; i <= rad; ++i)
    for (int j = -rad; j <= rad; ++j) norm += std::exp(-(i * i + j * j) / (2 * sigma * sigma));
  double acc = 0;
  for (int i = -rad; i <= rad; ++i)
    for (int j = -rad; j <= rad; ++j)
      acc += std::exp(-(i * i + j * j) / (2 * sigma * sigma)) * z.at(mirror(r + i, z.h), mirror(c + j, z.w), k);
  return acc / norm;
}

std::size_t lev_dp(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return d[a.size()][b.size()];
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Relative path -> bytes for every regular file below root.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

std::size_t code_points(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

// ---------------------------------------------------------------------------

bool c1(std::string& detail) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  for (int i = 0; i < 100; ++i) {
    const auto z = random_latent(8, 8, 4, rng), other = random_latent(8, 8, 4, rng);
    const auto M = random_mask(8, 8, rng);
    if (!(inject::freq_decompose_blend(z, z, M, 1.5) == z)) return detail = "self blend changed z", false;
    const seg::TokenMask zero{8, 8, 0.25, std::vector<std::uint8_t>(64, 0)};
    if (!(inject::freq_decompose_blend(z, other, zero, 1.5) == z)) return detail = "zero mask changed z", false;
  }
  const double s = seconds_since(t0);
  detail = std::to_string(s) + " s";
  return s < 1.0;
}

bool c2(std::string& detail) {
  std::mt19937_64 rng(102);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto z = random_latent(4, 4, 4, rng), tpl = random_latent(4, 4, 4, rng);
    const auto M = random_mask(4, 4, rng);
    const double sigma = 0.5 + (i % 4) * 0.5;
    const auto out = inject::freq_decompose_blend(z, tpl, M, sigma);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        for (int k = 0; k < 4; ++k) {
          const double lz = lf_at(z, r, c, k, sigma), lt = lf_at(tpl, r, c, k, sigma);
          const double want = M.at(r, c) ? lz + (tpl.at(r, c, k) - lt) : z.at(r, c, k);
          worst = std::max(worst, std::abs(out.at(r, c, k) - want));
        }
  }
  detail = "max error " + std::to_string(worst);
  return worst <= 1e-6;
}

bool c3(std::string& detail) {
  const auto s = diffusion::make_schedule(20);
  double worst = 0;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed);
    const auto z0 = random_latent(3, 5, 4, rng);
    const auto eps = diffusion::gaussian_like(z0, seed * 7919);
    for (int t = 1; t <= 20; ++t) {
      if (!(s.alpha[t] > diffusion::kAlphaGuard)) continue;
      const auto zt = diffusion::forward_noise(z0, t, s, eps);
      const auto prev = diffusion::scheduler_step(zt, eps, t, s);
      const auto want = diffusion::forward_noise(z0, t - 1, s, eps);
      for (std::size_t i = 0; i < want.values.size(); ++i)
        worst = std::max(worst, std::abs(prev.values[i] - want.values[i]));
      ++checked;
    }
  }
  detail = std::to_string(checked) + " steps, max error " + std::to_string(worst);
  return checked > 0 && worst <= 1e-6;
}

bool c4(std::string& detail) {
  std::mt19937_64 rng(104);
  inject::InjectionConfig cfg;
  cfg.s_plus = 2.0;
  cfg.s_minus = 0.1;
  const double lp = std::log(2.0), lm = std::log(0.1);
  for (int trial = 0; trial < 300; ++trial) {
    const int n_img = 1 + static_cast<int>(rng() % 40);
    const int n_txt = static_cast<int>(rng() % (64 - n_img + 1));
    inject::IndexSets sets;
    sets.n_img = n_img;
    for (int i = 0; i < n_img; ++i) (rng() % 3 == 0 ? sets.img : sets.non_img).push_back(i);
    for (int j = 0; j < n_txt; ++j)
      if (rng() % 2) sets.txt.push_back(n_img + j);
    const int n = n_img + n_txt;
    const Matrix B = inject::build_bias(sets, cfg, n);
    const std::set<int> txt(sets.txt.begin(), sets.txt.end()), img(sets.img.begin(), sets.img.end());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double want = 0.0;
        const bool ti = txt.count(i), tj = txt.count(j);
        const bool gi = img.count(i), gj = img.count(j);
        const bool ni = i < n_img && !gi, nj = j < n_img && !gj;
        if ((gi && tj) || (ti && gj)) want = lp;
        if ((ni && tj) || (ti && nj)) want = lm;
        if (B(i, j) != want) {
          detail = "mismatch at trial " + std::to_string(trial);
          return false;
        }
        if (B(i, j) != 0.0 && B(i, j) != lp && B(i, j) != lm) return detail = "value outside set", false;
      }
  }
  detail = "300 random index sets";
  return true;
}

bool c5(std::string& detail) {
  const diffusion::ToyDenoiser model;
  const auto s = diffusion::make_schedule(20);
  const std::string prompt = "a poster that says \"GLYPH\"";
  int up = 0, down = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    LatentGrid like(4, 4, 4);
    const auto z = diffusion::gaussian_like(like, seed);
    const int n_img = z.tokens();
    std::vector<int> ids;
    for (const auto& tok : diffusion::tokenize(prompt)) ids.push_back(diffusion::token_bucket(tok.text));
    const int n = n_img + static_cast<int>(ids.size());
    std::mt19937_64 rng(seed);
    seg::TokenMask m{4, 4, 0.25, std::vector<std::uint8_t>(16)};
    for (auto& b : m.covered) b = rng() % 2;
    m.covered[0] = 1;
    m.covered[15] = 0;
    const auto sets = inject::make_index_sets(m, inject::find_token_indices(prompt, n_img));
    const Matrix B = inject::build_bias(sets, inject::InjectionConfig{}, n);
    Matrix w0, w1;
    diffusion::ForwardOptions o0, o1;
    o0.probe = &w0;
    o1.probe = &w1;
    model.forward(z, 10, s, ids, Matrix::Zero(n, n), o0);
    model.forward(z, 10, s, ids, B, o1);
    // mass onto the quoted-text tokens only
    auto mass = [&](const Matrix& w, const std::vector<int>& rows) {
      double sum = 0;
      for (int r : rows)
        for (int c : sets.txt) sum += w(r, c);
      return sum / static_cast<double>(rows.size());
    };
    up += mass(w1, sets.img) > mass(w0, sets.img);
    down += mass(w1, sets.non_img) < mass(w0, sets.non_img);
  }
  detail = "enhanced " + std::to_string(up) + "/20, suppressed " + std::to_string(down) + "/20";
  return up == 20 && down == 20;
}

bool c6(std::string& detail) {
  plan::TypographyPlan p;
  plan::TextRegion r;
  r.content = "HI";
  r.bbox = {0.1, 0.2, 0.9, 0.8};
  p.text_regions.push_back(r);
  const diffusion::Codec codec(4);
  const diffusion::ToyDenoiser model;
  const auto res = inject::run_injection(p, 32, 32, "a sign that says \"HI\"", inject::InjectionConfig{}, 20, 7,
                                         codec, model);
  std::vector<int> fired;
  for (const auto& st : res.trace)
    if (st.injected) fired.push_back(st.step);
  std::sort(fired.begin(), fired.end());
  std::vector<int> want;
  for (int t = 4; t <= 15; ++t) want.push_back(t);
  detail = std::to_string(fired.size()) + " injected steps";
  return fired == want;
}

bool c7(std::string& detail) {
  const auto t0 = Clock::now();
  constexpr int kSize = 64, kPatch = 4;
  plan::TypographyPlan p;
  plan::TextRegion r;
  r.content = "HI";
  r.bbox = {0.1, 0.2, 0.9, 0.8};
  p.text_regions.push_back(r);
  const auto tpl = render::render_plan(p, kSize, kSize, render::FontRegistry::builtin());
  const diffusion::Codec codec(kPatch);
  const diffusion::ToyDenoiser model;
  const std::string prompt = "a sign that says \"HI\"";
  inject::InjectionConfig full, off;
  off.enable_fd = false;
  off.enable_reweight = false;
  auto corr = [&](const inject::InjectionConfig& cfg, seg::TokenMask* mask_out) {
    const auto res = inject::run_injection(tpl.image, tpl.background, prompt, cfg, 20, 7, codec, model);
    if (mask_out) *mask_out = res.token_mask;
    const auto region = inject::token_region(res.token_mask, kPatch, kSize, kSize);
    return inject::hf_correlation(codec.decode(res.z0), tpl.image, region, 1.5 * kPatch);
  };
  seg::TokenMask m;
  const double a = corr(full, &m), a2 = corr(full, nullptr), b = corr(off, nullptr);
  const double s = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "full %.4f vs ablated %.4f, repeat %s, %.2f s", a, b, a == a2 ? "identical" : "differs",
                s);
  detail = buf;
  return m.count() > 0 && a > b && a == a2 && s < 10.0;
}

bool c8(std::string& detail) {
  std::vector<std::string> all{""};
  for (int len = 1; len <= 6; ++len)
    for (int bits = 0; bits < (1 << len); ++bits) {
      std::string s;
      for (int k = 0; k < len; ++k) s += (bits >> k) & 1 ? 'b' : 'a';
      all.push_back(s);
    }
  for (const auto& a : all)
    for (const auto& b : all)
      if (metrics::levenshtein(std::string_view(a), std::string_view(b)) != lev_dp(a, b))
        return detail = "levenshtein mismatch " + a + "/" + b, false;
  if (metrics::ocr_acc({"hello", "hallo"}) != 0.8) return detail = "ocr_acc example", false;
  if (std::abs(metrics::ocr_ned({"kitten", "sitting"}) - 0.571429) > 1e-6) return detail = "ocr_ned example", false;
  std::mt19937_64 rng(108);
  const char alphabet[] = "abcde ";
  int violations = 0;
  std::string first;
  for (int i = 0; i < 1000; ++i) {
    std::string t, r;
    const int lt = 1 + static_cast<int>(rng() % 10), lr = static_cast<int>(rng() % 14);
    for (int k = 0; k < lt; ++k) t += alphabet[rng() % 5];
    for (int k = 0; k < lr; ++k) r += alphabet[rng() % 6];
    if (metrics::ocr_ned({t, r}) > metrics::ocr_acc({t, r})) {
      if (violations++ == 0) first = "\"" + t + "\" vs \"" + r + "\"";
    }
  }
  detail = "levenshtein " + std::to_string(all.size() * all.size()) + " pairs and examples ok; ocr_ned > ocr_acc on " +
           std::to_string(violations) + "/1000 pairs" + (violations ? ", first " + first : "");
  return violations == 0;
}

bool c9(std::string& detail) {
  const double in[] = {1.0, 0.28, 0.0, -0.2};
  const double want[] = {2.5, 0.7, 0.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    const double got = metrics::clip_rescale(in[i]);
    // 2.5 * 0.28 is the nearest double to 0.7 after rounding
    if (got != want[i] && !(i == 1 && got == 2.5 * 0.28 && std::abs(got - 0.7) < 1e-15)) {
      detail = "cos " + std::to_string(in[i]);
      return false;
    }
  }
  return true;
}

bool c10(std::string& detail) {
  const double a = bench::ablation_improvement(0.2703, 0.5531), b = bench::ablation_improvement(0.2703, 0.3776);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.1f and %.1f", a, b);
  detail = buf;
  return a == 104.6 && b == 39.7;
}

bool c11(std::string& detail) {
  const auto fx = bench::builtin_fixture();
  std::size_t text = 0, prompt = 0;
  for (const auto& s : fx) {
    std::string joined;
    for (const auto& t : s.texts) joined += t;
    text += code_points(joined);
    prompt += code_points(s.prompt);
  }
  const double want_text = std::round(100.0 * text / fx.size()) / 100.0;
  const double want_prompt = std::round(100.0 * prompt / fx.size()) / 100.0;
  const auto st = bench::compute_stats(fx);
  bool ok = st.total.count == fx.size() && st.total.avg_text_len == want_text &&
            st.total.avg_prompt_len == want_prompt && fx.size() == 6;
  char buf[200];
  std::snprintf(buf, sizeof buf, "fixture %zu / %.2f / %.2f", st.total.count, st.total.avg_text_len,
                st.total.avg_prompt_len);
  detail = buf;
  if (const char* real = std::getenv("GLYPHFORGE_BENCH_MANIFEST")) {
    const auto t = bench::compute_stats(bench::load_manifest(real));
    std::snprintf(buf, sizeof buf, "; full manifest %zu / %.2f / %.2f", t.total.count, t.total.avg_text_len,
                  t.total.avg_prompt_len);
    detail += buf;
    ok = ok && t.total.count == 290 && t.total.avg_text_len == 32.68 && t.total.avg_prompt_len == 76.62;
  } else {
    detail += "; full manifest not supplied";
  }
  return ok;
}

bool c12(std::string& detail) {
  static const char* kWords[] = {"GLYPH", "mango", "E=mc\xC2\xB2", "open", "\xCE\xB1+\xCE\xB2", "SALE", "50%",
                                 "caf\xC3\xA9", "WIDE-WORD-WITHOUT-SPACES"};
  const auto reg = render::FontRegistry::builtin();
  std::mt19937_64 rng(112);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    plan::TextRegion r;
    const int words = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < words; ++k) r.content += (k ? " " : "") + std::string(kWords[rng() % std::size(kWords)]);
    const double x0 = 0.6 * u(rng), y0 = 0.6 * u(rng);
    r.bbox = {x0, y0, x0 + 0.15 + 0.25 * u(rng), y0 + 0.1 + 0.3 * u(rng)};
    r.font = rng() % 2 ? "serif" : "auto";
    r.font_weight = static_cast<plan::FontWeight>(rng() % 3);
    r.font_size_ratio = 0.1 + 0.9 * u(rng);
    r.color = static_cast<plan::ColorName>(rng() % 13);
    r.alignment = static_cast<plan::Alignment>(rng() % 3);
    r.rotation = rng() % 4 == 0 ? 0.0 : -170.0 + 340.0 * u(rng);
    const auto a = render::render_template(r, 160, 120, reg);
    const auto b = render::render_template(r, 160, 120, reg);
    if (!(a == b)) return detail = "non-deterministic: " + r.content, false;
    for (int y = 0; y < a.mask.height; ++y)
      for (int x = 0; x < a.mask.width; ++x)
        if (a.mask.at(x, y) && !a.rect.contains(x, y)) return detail = "mask outside bbox: " + r.content, false;
    const render::BitmapFont& f = reg.resolve(r.font);
    const render::StructuredMathBackend math(&reg.resolve("serif"));
    const render::PlainTextBackend plain;
    const render::RenderBackend& be = a.is_math ? static_cast<const render::RenderBackend&>(math) : plain;
    for (const auto& l : a.lines)
      if (be.measure(l, {&f, a.font_px, r.font_weight}) > a.rect.width())
        return detail = "line wider than bbox: " + l, false;
  }
  detail = "50 regions";
  return true;
}

bool c13(std::string& detail) {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 100; ++trial) {
    std::normal_distribution<double> lo(40 + static_cast<double>(rng() % 60), 5 + static_cast<double>(rng() % 15));
    std::normal_distribution<double> hi(150 + static_cast<double>(rng() % 80), 5 + static_cast<double>(rng() % 15));
    const int n = 2000;
    Image img(n, 1, 1);
    for (int i = 0; i < n; ++i) {
      const double v = (rng() % 3 == 0 ? hi : lo)(rng);
      img.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    std::vector<long double> hist(256, 0);
    for (auto v : img.data) hist[v] += 1;
    int best_t = -1;
    long double best = -1;
    for (int t = 1; t <= 255; ++t) {
      long double w0 = 0, w1 = 0, s0 = 0, s1 = 0;
      for (int v = 0; v < 256; ++v) (v < t ? w0 : w1) += hist[v], (v < t ? s0 : s1) += v * hist[v];
      if (w0 == 0 || w1 == 0) continue;
      const long double d = s0 / w0 - s1 / w1;
      const long double var = w0 * w1 * d * d;
      if (var > best * (1 + 1e-15L)) best = var, best_t = t;
    }
    const int got = seg::otsu_threshold(img);
    // equal-variance neighbours are acceptable only if truly tied
    if (got != best_t) {
      long double w0 = 0, w1 = 0, s0 = 0, s1 = 0;
      for (int v = 0; v < 256; ++v) (v < got ? w0 : w1) += hist[v], (v < got ? s0 : s1) += v * hist[v];
      const long double d = s0 / w0 - s1 / w1;
      if (std::abs(w0 * w1 * d * d - best) > best * 1e-12L) {
        detail = "trial " + std::to_string(trial) + ": got " + std::to_string(got) + " want " + std::to_string(best_t);
        return false;
      }
    }
  }
  detail = "100 bimodal histograms";
  return true;
}

bool c14(std::string& detail) {
#ifdef GLYPHFORGE_CLI
  const fs::path root = fs::temp_directory_path() / ("gf_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(root);
  auto sh = [&](const std::string& args, const fs::path& out) {
    const std::string cmd = std::string("\"") + GLYPHFORGE_CLI + "\" " + args + " --out \"" + out.string() +
                            "\" > \"" + (root / "log.txt").string() + "\" 2>&1";
    return std::system(cmd.c_str());
  };
  const int r1 = sh("inject --mock --seed 7", root / "a");
  const int r2 = sh("inject --mock --seed 7", root / "b");
  const auto ta = tree(root / "a"), tb = tree(root / "b");
  const auto t0 = Clock::now();
  const int r3 = sh("refine --mock --seed 7", root / "c");
  const double s = seconds_since(t0);
  const bool same = ta == tb && !ta.empty();
  char buf[200];
  std::snprintf(buf, sizeof buf, "inject x2: %zu files %s; full pipeline %.1f s (exit %d/%d/%d)", ta.size(),
                same ? "byte-identical" : "DIFFER", s, r1, r2, r3);
  detail = buf;
  fs::remove_all(root);
  return r1 == 0 && r2 == 0 && r3 == 0 && same && s < 60.0;
#else
  detail = "CLI not built";
  return false;
#endif
}

bool c15(std::string& detail) {
  using namespace refine;
  Image img(8, 8, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<std::uint8_t>(i * 5);
  seg::PixelMask mask(8, 8, 0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 4; ++x) mask.at(x, y) = 1;
  auto scripted = [](std::vector<double> script) -> JudgeFn {
    auto k = std::make_shared<std::size_t>(0);
    return [script, k](const Image&, std::string_view) { return script.at((*k)++); };
  };
  CandidatePool pool;
  for (int i = 0; i < 4; ++i) pool.entries[i] = {static_cast<CandidateKind>(i), img, "P", false, ""};
  if (judge_select(pool, "P", scripted({0.5, 0.7, 0.6, 0.65})).kind != CandidateKind::kMask)
    return detail = "argmax", false;
  if (judge_select(pool, "P", scripted({0.4, 0.4, 0.4, 0.4})).kind != CandidateKind::kOrigin)
    return detail = "tie order", false;
  auto failed = pool;
  failed.entries[3].failed = true;
  // only three live candidates are scored; the failed sty never is
  if (judge_select(failed, "P", scripted({0.2, 0.3, 0.9})).kind != CandidateKind::kRef)
    return detail = "failed candidate not skipped", false;
  const auto res = refine_loop(img, "P", mask, DeterministicRefiner{},
                               [](const Image&, const std::string& p) { return p + ", crisp"; },
                               scripted({0.1, 0.9, 0.2, 0.3, 0.5, 0.1, 0.1, 0.1, 0.0, 0.0, 0.0, 0.0}), 3);
  if (res.rounds.size() != 2 || !res.rounds[1].converged || res.best_score != 0.9)
    return detail = "decreasing trace did not stop after round 2 keeping 0.9", false;
  int pools = 0;
  refine_loop(img, "P", mask, IdentityRefiner{},
              [&](const Image&, const std::string& p) { ++pools; return p; },
              [](const Image&, std::string_view) { return 0.5; }, 1);
  if (pools != 1) return detail = "max_rounds=1 built " + std::to_string(pools) + " pools", false;
  detail = "argmax, tie, exclusion, convergence stop";
  return true;
}

}  // namespace

int main() {
  run(1, "blend identity: self-blend and zero mask return z bit-exact, < 1 s", c1);
  run(2, "blend matches elementwise brute-force oracle to 1e-6", c2);
  run(3, "scheduler step with true noise recovers z_{t-1} to 1e-6", c3);
  run(4, "attention bias entries and placement match brute-force builder", c4);
  run(5, "bias raises glyph->text and lowers non-glyph->text attention mass", c5);
  run(6, "injection window [0.2, 0.8) fires at steps 4..15 for N=20", c6);
  run(7, "full injection beats ablated run on masked HF correlation, deterministic, < 10 s", c7);
  run(8, "edit distance and OCR metric oracles", c8);
  run(9, "CLIP rescale exact values", c9);
  run(10, "ablation improvement arithmetic 104.6 / 39.7", c10);
  run(11, "benchmark statistics match hand-summed oracle", c11);
  run(12, "renderer determinism, containment and line width bound", c12);
  run(13, "Otsu threshold matches exhaustive variance search", c13);
  run(14, "mock inject runs are byte-identical; full pipeline < 60 s", c14);
  run(15, "refinement selection, tie order and convergence stop", c15);
  std::printf("%d of 15 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
