#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <span>
#include <vector>

#include "glyphforge/image.hpp"

namespace glyphforge::diffusion {

using Matrix = Eigen::MatrixXd;  // rows are tokens

// Rectified-flow linear schedule: alpha_t = 1 - t/N, sigma_t = t/N.
struct NoiseSchedule {
  int N = 0;
  std::vector<double> alpha;  // N+1 entries
  std::vector<double> sigma;
};

NoiseSchedule make_schedule(int N);

// h x w token grid with d channels per token, row-major (r, c, k).
struct LatentGrid {
  int h = 0;
  int w = 0;
  int d = 0;
  int patch = 1;
  int src_w = 0;  // pixel size before padding; decode crops back to it
  int src_h = 0;
  std::vector<double> values;

  LatentGrid() = default;
  LatentGrid(int h_, int w_, int d_, double fill = 0.0);

  double& at(int r, int c, int k) { return values[(static_cast<std::size_t>(r) * w + c) * d + k]; }
  double at(int r, int c, int k) const { return values[(static_cast<std::size_t>(r) * w + c) * d + k]; }
  int tokens() const noexcept { return h * w; }
  bool same_shape(const LatentGrid& o) const noexcept { return h == o.h && w == o.w && d == o.d; }
  double l2() const;

  friend bool operator==(const LatentGrid&, const LatentGrid&) = default;
};

// Gaussian latent with the grid geometry of `like`.
LatentGrid gaussian_like(const LatentGrid& like, std::uint64_t seed);

// z_t = alpha_t * z0 + sigma_t * eps
LatentGrid forward_noise(const LatentGrid& z0, int t, const NoiseSchedule& s, const LatentGrid& eps);

// x0 = (z_t - sigma_t * eps_hat) / max(alpha_t, delta); z_{t-1} = alpha_{t-1} x0 + sigma_{t-1} eps_hat
inline constexpr double kAlphaGuard = 1e-4;
LatentGrid scheduler_step(const LatentGrid& z_t, const LatentGrid& eps_hat, int t, const NoiseSchedule& s);

// z~_t = forward_noise(template, t, eps*) for t = 0..N with one eps* drawn from `seed`.
std::vector<LatentGrid> invert_template(const LatentGrid& template_latent, const NoiseSchedule& s,
                                        std::uint64_t seed);

// Pixel field H x W x C in row-major order.
struct PixelField {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> values;

  double& at(int y, int x, int c) { return values[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  double at(int y, int x, int c) const {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  friend bool operator==(const PixelField&, const PixelField&) = default;
};

// Row-major patch traversal: token r*w + c holds the patch*patch*C values of
// patch (r, c). Non-divisible fields are padded with `fill` on the right/bottom.
struct Patches {
  Matrix tokens;
  int h = 0;
  int w = 0;
  int patch = 1;
  int src_h = 0;
  int src_w = 0;
  int channels = 0;
};
Patches patchify(const PixelField& field, int patch, double fill = 0.0);
PixelField unpatchify(const Patches& p);

// Grid <-> token matrix (one row per token).
Matrix to_tokens(const LatentGrid& z);
LatentGrid from_tokens(const Matrix& m, const LatentGrid& like);

// Toy VAE stand-in: per-patch RGB means mapped to [-1, 1], zero-padded to
// `depth` channels and rotated by a seeded orthogonal matrix.
class Codec {
 public:
  explicit Codec(int patch = 8, int depth = 4, std::uint64_t seed = 0x6c79);

  LatentGrid encode(const Image& img, Rgb pad = {255, 255, 255}) const;
  Image decode(const LatentGrid& z) const;
  // Per-patch mean image (what decode(encode(img)) reproduces), before 8-bit rounding.
  const Matrix& map() const noexcept { return map_; }
  int patch() const noexcept { return patch_; }
  int depth() const noexcept { return depth_; }

 private:
  int patch_;
  int depth_;
  Matrix map_;  // orthogonal depth x depth
};

// softmax(Q K^T / sqrt(d) + B) V. `weights` receives the softmax matrix when set.
Matrix attention_with_bias(const Matrix& Q, const Matrix& K, const Matrix& V, const Matrix& B,
                           Matrix* weights = nullptr);

// Rotary embedding over channel pairs (2i, 2i+1) within each head of width
// `head_dim`, angle = position * base^(-2i/head_dim).
void rope_apply(Matrix& Q, Matrix& K, const std::vector<int>& positions, int head_dim,
                double base = 10000.0);

// Whitespace-plus-punctuation tokenizer: runs of letters/digits, single
// punctuation marks and single CJK characters are tokens.
struct TextToken {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the prompt
  std::size_t end = 0;
};
std::vector<TextToken> tokenize(std::string_view prompt);
inline constexpr int kVocabBuckets = 4096;
int token_bucket(std::string_view token);  // FNV-1a of the lowercased token

struct DenoiserConfig {
  int model_dim = 32;
  int heads = 4;
  int blocks = 2;
  int latent_depth = 4;
  int ff_mult = 2;
  std::uint64_t seed = 0x7a11;
};

// Per-call options. `bias_blocks[l]` disables the bias in block l when false
// (missing entries default to on). `probe` receives block-0 attention weights
// averaged over heads.
struct ForwardOptions {
  std::vector<bool> bias_blocks;
  Matrix* probe = nullptr;
};

class ToyDenoiser {
 public:
  explicit ToyDenoiser(const DenoiserConfig& cfg = {});

  const DenoiserConfig& config() const noexcept { return cfg_; }

  // Noise prediction for the image tokens of z_t. `B` may be empty (treated
  // as zero) or square with side h*w + text_ids.size().
  LatentGrid forward(const LatentGrid& z_t, int t, const NoiseSchedule& s, const std::vector<int>& text_ids,
                     const Matrix& B, const ForwardOptions& opts = {}) const;

 private:
  struct Block {
    Matrix wq, wk, wv, wo, w1, w2;
  };
  DenoiserConfig cfg_;
  Matrix w_in_;    // depth x D
  Matrix w_out_;   // D x depth
  Matrix embed_;   // buckets x D
  std::vector<Block> blocks_;
};

// Plain sampling loop (no bias, no blending) from z_N.
LatentGrid sample_plain(const ToyDenoiser& model, const LatentGrid& z_N, const NoiseSchedule& s,
                        const std::vector<int>& text_ids);

// GFLT: "GFLT", u32 h, w, d (little-endian), then h*w*d float32 LE values.
std::vector<std::uint8_t> encode_gflt(const LatentGrid& z);
LatentGrid decode_gflt(std::span<const std::uint8_t> bytes);
void write_gflt(const std::filesystem::path& path, const LatentGrid& z);
LatentGrid read_gflt(const std::filesystem::path& path);

}  // namespace glyphforge::diffusion
