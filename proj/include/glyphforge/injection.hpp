#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/diffusion.hpp"
#include "glyphforge/glyph_renderer.hpp"
#include "glyphforge/segmentation.hpp"

namespace glyphforge::inject {

using diffusion::LatentGrid;
using diffusion::Matrix;

// Global token indices: image tokens occupy [0, n_img), text tokens follow.
struct IndexSets {
  std::vector<int> txt;      // I_txt
  std::vector<int> img;      // I_img, glyph-covered image tokens
  std::vector<int> non_img;  // complement of I_img among image tokens
  int n_img = 0;

  // Throws ValidationError on overlap, out-of-range or incomplete partition.
  void validate(int n_total) const;
};

IndexSets make_index_sets(const seg::TokenMask& mask, std::vector<int> txt);

struct InjectionConfig {
  double tau_start = 0.2;
  double tau_end = 0.8;
  double s_plus = 2.0;
  double s_minus = 0.1;
  double blur_sigma = 1.5;  // latent cells
  double theta = 0.25;      // token coverage threshold
  bool enable_fd = true;
  bool enable_reweight = true;
  std::vector<bool> bias_blocks;  // per denoiser block; empty = all on

  void validate() const;
};

// Indices (offset by `n_img`) of prompt tokens inside double-quoted spans.
std::vector<int> find_token_indices(std::string_view prompt, int n_img);

// Zero matrix with log(s_plus) on (I_img x I_txt) and its transpose and
// log(s_minus) on (non-glyph x I_txt) and its transpose.
Matrix build_bias(const IndexSets& sets, const InjectionConfig& cfg, int n_total);

// Separable Gaussian per channel, radius ceil(3 sigma), reflect padding,
// normalized kernel. sigma = 0 is the identity.
LatentGrid gaussian_blur_latent(const LatentGrid& z, double sigma);

// LF(z) + HF(z) * (1 - M) + HF(z_tpl) * M with LF = blur, HF = x - LF(x).
LatentGrid freq_decompose_blend(const LatentGrid& z, const LatentGrid& z_tpl, const seg::TokenMask& M,
                                double sigma);

// t/N in [tau_start, tau_end).
bool in_window(int t, int N, const InjectionConfig& cfg);

struct StepTrace {
  int step = 0;
  bool injected = false;
  int bias_nonzeros = 0;
  double latent_l2 = 0.0;
};

std::string trace_to_jsonl(const std::vector<StepTrace>& trace);

struct InjectionResult {
  LatentGrid z0;
  LatentGrid template_latent;
  seg::PixelMask pixel_mask;
  seg::TokenMask token_mask;
  IndexSets sets;
  int otsu = 0;
  std::vector<int> text_ids;
  std::vector<StepTrace> trace;
};

// Full injection loop: Otsu mask of the template, quoted-token indices, inversion of
// the template latent, then for t = N..1 a biased denoiser forward, the
// frequency-decomposed blend when t/N is in the window, and a scheduler step.
InjectionResult run_injection(const Image& template_image, Rgb template_background, std::string_view prompt,
                              const InjectionConfig& cfg, int N, std::uint64_t seed, const diffusion::Codec& codec,
                              const diffusion::ToyDenoiser& model);

// Renders the plan into a template first.
InjectionResult run_injection(const plan::TypographyPlan& plan, int width, int height, std::string_view prompt,
                              const InjectionConfig& cfg, int N, std::uint64_t seed, const diffusion::Codec& codec,
                              const diffusion::ToyDenoiser& model,
                              const render::FontRegistry& registry = render::FontRegistry::builtin());

// Initial noise z_N for a seed (same stream run_injection uses).
LatentGrid initial_noise(const LatentGrid& like, std::uint64_t seed);

// Pearson correlation of the high-frequency parts (gray minus Gaussian blur of
// width `sigma_px`) of two images over the pixels where `region` is set.
double hf_correlation(const Image& a, const Image& b, const seg::PixelMask& region, double sigma_px);

// Pixel mask of the pixels belonging to covered tokens.
seg::PixelMask token_region(const seg::TokenMask& m, int patch, int width, int height);

}  // namespace glyphforge::inject
