#include "glyphforge/injection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "glyphforge/errors.hpp"
#include "glyphforge/rng.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge::inject {

namespace {

constexpr std::uint64_t kStreamInitialNoise = 12;

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Mirror without repeating the edge sample: -1 -> 1, n -> n-2.
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

void IndexSets::validate(int n_total) const {
  std::vector<int> seen(static_cast<std::size_t>(std::max(n_total, 0)), 0);
  auto mark = [&](const std::vector<int>& v, const char* name, bool image) {
    for (int i : v) {
      if (i < 0 || i >= n_total) throw ValidationError(std::string("index out of range in ") + name);
      if (image && i >= n_img) throw ValidationError(std::string(name) + " holds a non-image token");
      if (!image && i < n_img) throw ValidationError("I_txt overlaps the image tokens");
      if (seen[i]++) throw ValidationError(std::string("index overlap in ") + name);
    }
  };
  mark(img, "I_img", true);
  mark(non_img, "non-glyph set", true);
  mark(txt, "I_txt", false);
  if (static_cast<int>(img.size() + non_img.size()) != n_img) {
    throw ValidationError("glyph and non-glyph sets do not cover all image tokens");
  }
}

IndexSets make_index_sets(const seg::TokenMask& mask, std::vector<int> txt) {
  IndexSets s;
  s.n_img = mask.h * mask.w;
  s.img = mask.covered_indices();
  s.non_img = mask.uncovered_indices();
  s.txt = std::move(txt);
  return s;
}

void InjectionConfig::validate() const {
  if (!(0.0 <= tau_start && tau_start < tau_end && tau_end <= 1.0)) {
    throw ValidationError("window must satisfy 0 <= start < end <= 1", "window");
  }
  if (!(0.0 < s_minus && s_minus < 1.0)) throw ValidationError("suppression scale must be in (0,1)", "suppress");
  if (!(s_plus > 1.0)) throw ValidationError("enhancement scale must be > 1", "enhance");
  if (!(blur_sigma >= 0.0)) throw ValidationError("blur sigma must be >= 0", "blur_sigma");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("coverage threshold must be in [0,1]", "theta");
}

std::vector<int> find_token_indices(std::string_view prompt, int n_img) {
  const auto spans = text::find_quoted_spans(prompt);
  const auto tokens = diffusion::tokenize(prompt);
  std::vector<int> out;
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    for (const auto& sp : spans) {
      if (tokens[j].begin >= sp.begin && tokens[j].end <= sp.end) {
        out.push_back(n_img + static_cast<int>(j));
        break;
      }
    }
  }
  return out;
}

Matrix build_bias(const IndexSets& sets, const InjectionConfig& cfg, int n_total) {
  sets.validate(n_total);
  Matrix B = Matrix::Zero(n_total, n_total);
  const double a_plus = std::log(cfg.s_plus);
  const double a_minus = std::log(cfg.s_minus);
  for (int j : sets.txt) {
    for (int i : sets.img) {
      B(i, j) += a_plus;
      B(j, i) += a_plus;
    }
    for (int i : sets.non_img) {
      B(i, j) += a_minus;
      B(j, i) += a_minus;
    }
  }
  return B;
}

LatentGrid gaussian_blur_latent(const LatentGrid& z, double sigma) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0", "sigma");
  if (sigma == 0.0 || z.values.empty()) return z;
  const auto k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  LatentGrid tmp = z, out = z;
  for (int r = 0; r < z.h; ++r) {
    for (int c = 0; c < z.w; ++c) {
      for (int ch = 0; ch < z.d; ++ch) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * z.at(r, reflect(c + i, z.w), ch);
        tmp.at(r, c, ch) = acc;
      }
    }
  }
  for (int r = 0; r < z.h; ++r) {
    for (int c = 0; c < z.w; ++c) {
      for (int ch = 0; ch < z.d; ++ch) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp.at(reflect(r + i, z.h), c, ch);
        out.at(r, c, ch) = acc;
      }
    }
  }
  return out;
}

LatentGrid freq_decompose_blend(const LatentGrid& z, const LatentGrid& z_tpl, const seg::TokenMask& M, double sigma) {
  if (!z.same_shape(z_tpl)) throw ShapeError("blend: latent and template shapes differ");
  if (M.h != z.h || M.w != z.w || M.covered.size() != static_cast<std::size_t>(z.tokens())) {
    throw ShapeError("blend: mask grid does not match latent grid");
  }
  if (sigma == 0.0) return z;  // HF vanishes
  // LF(z) + HF(z) is z itself off the mask; on the mask LF(z) + HF(z_tpl) is
  // evaluated as z_tpl + (LF(z) - LF(z_tpl)) so that z_tpl == z gives z bit-exactly.
  const LatentGrid lf = gaussian_blur_latent(z, sigma);
  const LatentGrid lf_tpl = gaussian_blur_latent(z_tpl, sigma);
  LatentGrid out = z;
  for (int i = 0; i < z.tokens(); ++i) {
    if (!M.covered[i]) continue;
    for (int k = 0; k < z.d; ++k) {
      const std::size_t p = static_cast<std::size_t>(i) * z.d + k;
      out.values[p] = z_tpl.values[p] + (lf.values[p] - lf_tpl.values[p]);
    }
  }
  return out;
}

bool in_window(int t, int N, const InjectionConfig& cfg) {
  // Compared as t against tau*N with a tolerance so 0.2*20 counts as step 4.
  const double lo = cfg.tau_start * N, hi = cfg.tau_end * N;
  constexpr double eps = 1e-9;
  return t >= lo - eps && t < hi - eps;
}

std::string trace_to_jsonl(const std::vector<StepTrace>& trace) {
  std::string out;
  char buf[160];
  for (const auto& s : trace) {
    std::snprintf(buf, sizeof(buf), "{\"step\":%d,\"injected\":%s,\"bias_nonzeros\":%d,\"latent_l2\":%.9g}\n", s.step,
                  s.injected ? "true" : "false", s.bias_nonzeros, s.latent_l2);
    out += buf;
  }
  return out;
}

LatentGrid initial_noise(const LatentGrid& like, std::uint64_t seed) {
  return diffusion::gaussian_like(like, derive_seed(seed, kStreamInitialNoise));
}

InjectionResult run_injection(const Image& template_image, Rgb template_background, std::string_view prompt,
                              const InjectionConfig& cfg, int N, std::uint64_t seed, const diffusion::Codec& codec,
                              const diffusion::ToyDenoiser& model) {
  cfg.validate();
  const auto schedule = diffusion::make_schedule(N);
  InjectionResult res;

  // Preprocessing: mask, token sets, template latent.
  const Image gray = to_gray(template_image);
  const int bg = (299 * template_background.r + 587 * template_background.g + 114 * template_background.b + 500) / 1000;
  res.otsu = seg::otsu_threshold(gray);
  res.pixel_mask = seg::binarize(gray, res.otsu, bg);
  res.token_mask = seg::downsample_mask(res.pixel_mask, codec.patch(), cfg.theta);
  res.template_latent = codec.encode(template_image, template_background);
  const int n_img = res.template_latent.tokens();
  for (const auto& tok : diffusion::tokenize(prompt)) res.text_ids.push_back(diffusion::token_bucket(tok.text));
  res.sets = make_index_sets(res.token_mask, find_token_indices(prompt, n_img));
  const int n_total = n_img + static_cast<int>(res.text_ids.size());
  const Matrix B = cfg.enable_reweight ? build_bias(res.sets, cfg, n_total) : Matrix();
  const int nonzeros = cfg.enable_reweight ? static_cast<int>((B.array() != 0.0).count()) : 0;
  const auto inverted = diffusion::invert_template(res.template_latent, schedule, seed);

  diffusion::ForwardOptions opts;
  opts.bias_blocks = cfg.bias_blocks;
  LatentGrid z = initial_noise(res.template_latent, seed);
  for (int t = N; t >= 1; --t) {
    const LatentGrid eps = model.forward(z, t, schedule, res.text_ids, B, opts);
    const bool inject = cfg.enable_fd && in_window(t, N, cfg);
    if (inject) z = freq_decompose_blend(z, inverted[t], res.token_mask, cfg.blur_sigma);
    z = diffusion::scheduler_step(z, eps, t, schedule);
    res.trace.push_back({t, inject, nonzeros, z.l2()});
  }
  res.z0 = std::move(z);
  return res;
}

InjectionResult run_injection(const plan::TypographyPlan& plan, int width, int height, std::string_view prompt,
                              const InjectionConfig& cfg, int N, std::uint64_t seed, const diffusion::Codec& codec,
                              const diffusion::ToyDenoiser& model, const render::FontRegistry& registry) {
  const auto tpl = render::render_plan(plan, width, height, registry);
  return run_injection(tpl.image, tpl.background, prompt, cfg, N, seed, codec, model);
}

seg::PixelMask token_region(const seg::TokenMask& m, int patch, int width, int height) {
  seg::PixelMask out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int r = y / patch, c = x / patch;
      if (r < m.h && c < m.w && m.at(r, c)) out.at(x, y) = 1;
    }
  }
  return out;
}

double hf_correlation(const Image& a, const Image& b, const seg::PixelMask& region, double sigma_px) {
  if (a.width != b.width || a.height != b.height || region.width != a.width || region.height != a.height) {
    throw ShapeError("hf_correlation: image and region sizes differ");
  }
  auto hf = [&](const Image& img) {
    const Image g = to_gray(img);
    LatentGrid f(g.height, g.width, 1);
    for (std::size_t i = 0; i < g.data.size(); ++i) f.values[i] = g.data[i];
    const LatentGrid lf = gaussian_blur_latent(f, sigma_px);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] -= lf.values[i];
    return f.values;
  };
  const auto ha = hf(a), hb = hf(b);
  double n = 0, sa = 0, sb = 0;
  for (std::size_t i = 0; i < ha.size(); ++i) {
    if (!region.bits[i]) continue;
    n += 1;
    sa += ha[i];
    sb += hb[i];
  }
  if (n < 2) throw DegenerateInputError("hf_correlation: region has fewer than 2 pixels");
  const double ma = sa / n, mb = sb / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < ha.size(); ++i) {
    if (!region.bits[i]) continue;
    cov += (ha[i] - ma) * (hb[i] - mb);
    va += (ha[i] - ma) * (ha[i] - ma);
    vb += (hb[i] - mb) * (hb[i] - mb);
  }
  if (va == 0 || vb == 0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace glyphforge::inject
