#include "glyphforge/diffusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <cstring>
#include <fstream>

#include "glyphforge/errors.hpp"
#include "glyphforge/rng.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge::diffusion {

namespace {

constexpr std::uint64_t kStreamInversion = 11;

Matrix gaussian_matrix(int rows, int cols, double scale, Rng& rng) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian() * scale;
  }
  return m;
}

void check_shape(const LatentGrid& a, const LatentGrid& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": latent shapes differ (" + std::to_string(a.h) + "x" +
                     std::to_string(a.w) + "x" + std::to_string(a.d) + " vs " + std::to_string(b.h) + "x" +
                     std::to_string(b.w) + "x" + std::to_string(b.d) + ")");
  }
}

Matrix rms_norm(const Matrix& x) {
  Matrix out = x;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double rms = std::sqrt(x.row(r).squaredNorm() / static_cast<double>(x.cols()) + 1e-6);
    out.row(r) /= rms;
  }
  return out;
}

}  // namespace

NoiseSchedule make_schedule(int N) {
  if (N < 1) throw ValidationError("step count must be >= 1", "steps");
  NoiseSchedule s;
  s.N = N;
  s.alpha.resize(N + 1);
  s.sigma.resize(N + 1);
  for (int t = 0; t <= N; ++t) {
    s.sigma[t] = static_cast<double>(t) / N;
    s.alpha[t] = 1.0 - s.sigma[t];
  }
  return s;
}

LatentGrid::LatentGrid(int h_, int w_, int d_, double fill)
    : h(h_), w(w_), d(d_), values(static_cast<std::size_t>(h_) * w_ * d_, fill) {
  if (h_ < 0 || w_ < 0 || d_ < 0) throw ShapeError("negative latent dimensions");
}

double LatentGrid::l2() const {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc);
}

LatentGrid gaussian_like(const LatentGrid& like, std::uint64_t seed) {
  LatentGrid out = like;
  Rng rng(seed);
  for (double& v : out.values) v = rng.gaussian();
  return out;
}

LatentGrid forward_noise(const LatentGrid& z0, int t, const NoiseSchedule& s, const LatentGrid& eps) {
  check_shape(z0, eps, "forward_noise");
  if (t < 0 || t > s.N) throw ValidationError("timestep out of range", "t");
  LatentGrid out = z0;
  const double a = s.alpha[t], g = s.sigma[t];
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a * z0.values[i] + g * eps.values[i];
  return out;
}

LatentGrid scheduler_step(const LatentGrid& z_t, const LatentGrid& eps_hat, int t, const NoiseSchedule& s) {
  check_shape(z_t, eps_hat, "scheduler_step");
  if (t < 1 || t > s.N) throw ValidationError("scheduler step requires 1 <= t <= N", "t");
  LatentGrid out = z_t;
  const double a = std::max(s.alpha[t], kAlphaGuard);
  const double g = s.sigma[t];
  const double a_prev = s.alpha[t - 1], g_prev = s.sigma[t - 1];
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double x0 = (z_t.values[i] - g * eps_hat.values[i]) / a;
    out.values[i] = a_prev * x0 + g_prev * eps_hat.values[i];
  }
  return out;
}

std::vector<LatentGrid> invert_template(const LatentGrid& template_latent, const NoiseSchedule& s,
                                        std::uint64_t seed) {
  const LatentGrid eps = gaussian_like(template_latent, derive_seed(seed, kStreamInversion));
  std::vector<LatentGrid> out;
  out.reserve(s.N + 1);
  for (int t = 0; t <= s.N; ++t) out.push_back(forward_noise(template_latent, t, s, eps));
  return out;
}

// ---------------------------------------------------------------------------
// Patches

Patches patchify(const PixelField& f, int patch, double fill) {
  if (patch <= 0) throw ValidationError("patch must be positive", "patch");
  if (f.values.size() != static_cast<std::size_t>(f.height) * f.width * f.channels) {
    throw ShapeError("pixel field size does not match its dimensions");
  }
  Patches p;
  p.patch = patch;
  p.src_h = f.height;
  p.src_w = f.width;
  p.channels = f.channels;
  p.h = (f.height + patch - 1) / patch;
  p.w = (f.width + patch - 1) / patch;
  p.tokens = Matrix::Constant(p.h * p.w, patch * patch * f.channels, fill);
  for (int r = 0; r < p.h; ++r) {
    for (int c = 0; c < p.w; ++c) {
      for (int dy = 0; dy < patch; ++dy) {
        for (int dx = 0; dx < patch; ++dx) {
          const int y = r * patch + dy, x = c * patch + dx;
          if (y >= f.height || x >= f.width) continue;
          for (int k = 0; k < f.channels; ++k) {
            p.tokens(r * p.w + c, (dy * patch + dx) * f.channels + k) = f.at(y, x, k);
          }
        }
      }
    }
  }
  return p;
}

PixelField unpatchify(const Patches& p) {
  PixelField f;
  f.height = p.src_h;
  f.width = p.src_w;
  f.channels = p.channels;
  f.values.assign(static_cast<std::size_t>(f.height) * f.width * f.channels, 0.0);
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      const int token = (y / p.patch) * p.w + x / p.patch;
      const int off = ((y % p.patch) * p.patch + x % p.patch) * p.channels;
      for (int k = 0; k < f.channels; ++k) f.at(y, x, k) = p.tokens(token, off + k);
    }
  }
  return f;
}

Matrix to_tokens(const LatentGrid& z) {
  Matrix m(z.tokens(), z.d);
  for (int i = 0; i < z.tokens(); ++i) {
    for (int k = 0; k < z.d; ++k) m(i, k) = z.values[static_cast<std::size_t>(i) * z.d + k];
  }
  return m;
}

LatentGrid from_tokens(const Matrix& m, const LatentGrid& like) {
  if (m.rows() != like.tokens() || m.cols() != like.d) throw ShapeError("token matrix does not match latent grid");
  LatentGrid out = like;
  for (int i = 0; i < like.tokens(); ++i) {
    for (int k = 0; k < like.d; ++k) out.values[static_cast<std::size_t>(i) * like.d + k] = m(i, k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Codec

Codec::Codec(int patch, int depth, std::uint64_t seed) : patch_(patch), depth_(depth) {
  if (patch < 1) throw ValidationError("patch must be positive", "patch");
  if (depth < 3) throw ValidationError("latent depth must hold the 3 color channels", "depth");
  Rng rng(seed);
  const Matrix g = gaussian_matrix(depth, depth, 1.0, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  map_ = qr.householderQ();
}

LatentGrid Codec::encode(const Image& src, Rgb pad) const {
  if (src.empty()) throw DegenerateInputError("cannot encode an empty image");
  const Image img = to_rgb(src);
  const int h = (img.height + patch_ - 1) / patch_;
  const int w = (img.width + patch_ - 1) / patch_;
  LatentGrid z(h, w, depth_);
  z.patch = patch_;
  z.src_w = img.width;
  z.src_h = img.height;
  const std::uint8_t pad_c[3] = {pad.r, pad.g, pad.b};
  Eigen::VectorXd v(depth_);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      v.setZero();
      for (int dy = 0; dy < patch_; ++dy) {
        for (int dx = 0; dx < patch_; ++dx) {
          const int y = r * patch_ + dy, x = c * patch_ + dx;
          const bool inside = y < img.height && x < img.width;
          for (int k = 0; k < 3; ++k) v[k] += inside ? img.at(x, y, k) : pad_c[k];
        }
      }
      for (int k = 0; k < 3; ++k) v[k] = 2.0 * v[k] / (255.0 * patch_ * patch_) - 1.0;
      const Eigen::VectorXd zt = map_ * v;
      for (int k = 0; k < depth_; ++k) z.at(r, c, k) = zt[k];
    }
  }
  return z;
}

Image Codec::decode(const LatentGrid& z) const {
  if (z.d != depth_) throw ShapeError("latent depth does not match codec");
  const int W = z.src_w > 0 ? z.src_w : z.w * patch_;
  const int H = z.src_h > 0 ? z.src_h : z.h * patch_;
  Image img(W, H, 3);
  Eigen::VectorXd zt(depth_);
  for (int r = 0; r < z.h; ++r) {
    for (int c = 0; c < z.w; ++c) {
      for (int k = 0; k < depth_; ++k) zt[k] = z.at(r, c, k);
      const Eigen::VectorXd v = map_.transpose() * zt;
      std::uint8_t px[3];
      for (int k = 0; k < 3; ++k) {
        const double val = std::isfinite(v[k]) ? (v[k] + 1.0) * 127.5 : 0.0;
        px[k] = static_cast<std::uint8_t>(std::clamp(std::lround(val), 0L, 255L));
      }
      for (int dy = 0; dy < patch_; ++dy) {
        for (int dx = 0; dx < patch_; ++dx) {
          const int y = r * patch_ + dy, x = c * patch_ + dx;
          if (y < H && x < W) img.set_rgb(x, y, {px[0], px[1], px[2]});
        }
      }
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Attention

Matrix attention_with_bias(const Matrix& Q, const Matrix& K, const Matrix& V, const Matrix& B, Matrix* weights) {
  const Eigen::Index n = Q.rows();
  if (K.rows() != V.rows() || Q.cols() != K.cols()) throw ShapeError("attention: Q/K/V shapes disagree");
  if (B.rows() != n || B.cols() != K.rows()) throw ShapeError("attention: bias must be n x n");
  if (!Q.allFinite() || !K.allFinite() || !V.allFinite() || !B.allFinite()) {
    throw ValidationError("attention: non-finite input");
  }
  Matrix logits = (Q * K.transpose()) / std::sqrt(static_cast<double>(Q.cols())) + B;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mx = logits.row(r).maxCoeff();
    logits.row(r) = (logits.row(r).array() - mx).exp();
    logits.row(r) /= logits.row(r).sum();
  }
  Matrix out = logits * V;
  if (weights != nullptr) *weights = std::move(logits);
  return out;
}

void rope_apply(Matrix& Q, Matrix& K, const std::vector<int>& positions, int head_dim, double base) {
  if (head_dim <= 0 || head_dim % 2 != 0) throw ValidationError("rope: head dimension must be even");
  if (Q.cols() % head_dim != 0 || K.cols() != Q.cols()) throw ShapeError("rope: channel count not a multiple of head dim");
  if (static_cast<Eigen::Index>(positions.size()) != Q.rows() || K.rows() != Q.rows()) {
    throw ShapeError("rope: one position per token required");
  }
  const int heads = static_cast<int>(Q.cols()) / head_dim;
  for (Eigen::Index r = 0; r < Q.rows(); ++r) {
    for (int i = 0; i < head_dim / 2; ++i) {
      const double theta = positions[r] * std::pow(base, -2.0 * i / head_dim);
      const double cs = std::cos(theta), sn = std::sin(theta);
      for (int hd = 0; hd < heads; ++hd) {
        const int a = hd * head_dim + 2 * i, b = a + 1;
        for (Matrix* m : {&Q, &K}) {
          const double x = (*m)(r, a), y = (*m)(r, b);
          (*m)(r, a) = x * cs - y * sn;
          (*m)(r, b) = x * sn + y * cs;
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

bool is_cjk(char32_t cp) {
  return (cp >= 0x3040 && cp <= 0x30FF) || (cp >= 0x3400 && cp <= 0x9FFF) || (cp >= 0xF900 && cp <= 0xFAFF) ||
         (cp >= 0xAC00 && cp <= 0xD7AF) || (cp >= 0x20000 && cp <= 0x2FFFF);
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) return !std::isalnum(static_cast<int>(cp)) && !text::is_space(cp);
  return (cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x2190 && cp <= 0x22FF) || (cp >= 0x3000 && cp <= 0x303F) ||
         (cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) || cp == 0xD7 || cp == 0xF7 ||
         cp == 0xB1 || cp == 0xAB || cp == 0xBB;
}

}  // namespace

std::vector<TextToken> tokenize(std::string_view prompt) {
  std::vector<TextToken> out;
  std::size_t i = 0;
  bool in_word = false;
  while (i < prompt.size()) {
    const std::size_t start = i;
    const char32_t cp = text::decode_one(prompt, i);
    if (text::is_space(cp)) {
      in_word = false;
    } else if (is_punct(cp) || is_cjk(cp)) {
      out.push_back({std::string(prompt.substr(start, i - start)), start, i});
      in_word = false;
    } else if (in_word) {
      out.back().text.append(prompt.substr(start, i - start));
      out.back().end = i;
    } else {
      out.push_back({std::string(prompt.substr(start, i - start)), start, i});
      in_word = true;
    }
  }
  return out;
}

int token_bucket(std::string_view token) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::string lowered;
  for (char32_t cp : text::decode_utf8(token)) text::append_utf8(lowered, text::to_lower(cp));
  for (unsigned char c : lowered) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return static_cast<int>(h % kVocabBuckets);
}

// ---------------------------------------------------------------------------
// Toy denoiser

ToyDenoiser::ToyDenoiser(const DenoiserConfig& cfg) : cfg_(cfg) {
  if (cfg.model_dim <= 0 || cfg.heads <= 0 || cfg.model_dim % cfg.heads != 0 || (cfg.model_dim / cfg.heads) % 2) {
    throw ValidationError("model dim must split into even-width heads");
  }
  if (cfg.blocks < 1 || cfg.latent_depth < 1 || cfg.ff_mult < 1) throw ValidationError("invalid denoiser config");
  Rng rng(cfg.seed);
  const int D = cfg.model_dim;
  const double s = 1.0 / std::sqrt(static_cast<double>(D));
  w_in_ = gaussian_matrix(cfg.latent_depth, D, 1.0 / std::sqrt(static_cast<double>(cfg.latent_depth)), rng);
  embed_ = gaussian_matrix(kVocabBuckets, D, 1.0, rng);
  for (int l = 0; l < cfg.blocks; ++l) {
    Block b;
    b.wq = gaussian_matrix(D, D, s, rng);
    b.wk = gaussian_matrix(D, D, s, rng);
    b.wv = gaussian_matrix(D, D, s, rng);
    b.wo = gaussian_matrix(D, D, s, rng);
    b.w1 = gaussian_matrix(D, D * cfg.ff_mult, s, rng);
    b.w2 = gaussian_matrix(D * cfg.ff_mult, D, 1.0 / std::sqrt(static_cast<double>(D * cfg.ff_mult)), rng);
    blocks_.push_back(std::move(b));
  }
  w_out_ = gaussian_matrix(D, cfg.latent_depth, s, rng);
}

LatentGrid ToyDenoiser::forward(const LatentGrid& z_t, int t, const NoiseSchedule& s, const std::vector<int>& text_ids,
                                const Matrix& B, const ForwardOptions& opts) const {
  if (z_t.d != cfg_.latent_depth) throw ShapeError("latent depth does not match denoiser");
  if (t < 0 || t > s.N) throw ValidationError("timestep out of range", "t");
  const int n_img = z_t.tokens();
  const int n = n_img + static_cast<int>(text_ids.size());
  const bool has_bias = B.size() != 0;
  if (has_bias && (B.rows() != n || B.cols() != n)) {
    throw ShapeError("bias side " + std::to_string(B.rows()) + " does not match sequence length " + std::to_string(n));
  }
  const int D = cfg_.model_dim;
  const int hd = D / cfg_.heads;

  // H = [X_img || X_txt]
  Matrix H(n, D);
  H.topRows(n_img) = to_tokens(z_t) * w_in_;
  const double tau = static_cast<double>(t) / s.N;
  Eigen::RowVectorXd temb(D);
  for (int i = 0; i < D / 2; ++i) {
    const double f = std::pow(10000.0, -2.0 * i / D) * 1000.0 * tau;
    temb[2 * i] = std::sin(f);
    temb[2 * i + 1] = std::cos(f);
  }
  H.topRows(n_img).rowwise() += temb;
  for (int j = 0; j < static_cast<int>(text_ids.size()); ++j) {
    if (text_ids[j] < 0 || text_ids[j] >= kVocabBuckets) throw ValidationError("text token id out of range");
    H.row(n_img + j) = embed_.row(text_ids[j]);
  }

  std::vector<int> positions(n);
  for (int i = 0; i < n; ++i) positions[i] = i;
  const Matrix zero_bias = Matrix::Zero(n, n);

  for (int l = 0; l < cfg_.blocks; ++l) {
    const Block& blk = blocks_[l];
    const bool bias_on = has_bias && (l >= static_cast<int>(opts.bias_blocks.size()) || opts.bias_blocks[l]);
    const Matrix& Bl = bias_on ? B : zero_bias;
    const Matrix Hn = rms_norm(H);
    Matrix Q = Hn * blk.wq, K = Hn * blk.wk;
    const Matrix V = Hn * blk.wv;
    rope_apply(Q, K, positions, hd);
    Matrix A(n, D);
    Matrix probe_sum;
    for (int h = 0; h < cfg_.heads; ++h) {
      Matrix w;
      A.middleCols(h * hd, hd) =
          attention_with_bias(Q.middleCols(h * hd, hd), K.middleCols(h * hd, hd), V.middleCols(h * hd, hd), Bl,
                              l == 0 && opts.probe != nullptr ? &w : nullptr);
      if (l == 0 && opts.probe != nullptr) probe_sum = probe_sum.size() ? Matrix(probe_sum + w) : w;
    }
    if (l == 0 && opts.probe != nullptr) *opts.probe = probe_sum / cfg_.heads;
    H += A * blk.wo;
    const Matrix Fn = rms_norm(H);
    H += (Fn * blk.w1).array().tanh().matrix() * blk.w2;
  }

  // Skip parametrization: eps_hat = z_t + alpha_t * f, so x0_hat = z_t - sigma_t * f.
  const Matrix f = H.topRows(n_img) * w_out_;
  LatentGrid eps = z_t;
  const double a = s.alpha[t];
  for (int i = 0; i < n_img; ++i) {
    for (int k = 0; k < z_t.d; ++k) eps.values[static_cast<std::size_t>(i) * z_t.d + k] += a * f(i, k);
  }
  return eps;
}

LatentGrid sample_plain(const ToyDenoiser& model, const LatentGrid& z_N, const NoiseSchedule& s,
                        const std::vector<int>& text_ids) {
  LatentGrid z = z_N;
  for (int t = s.N; t >= 1; --t) {
    const LatentGrid eps = model.forward(z, t, s, text_ids, Matrix());
    z = scheduler_step(z, eps, t, s);
  }
  return z;
}

// ---------------------------------------------------------------------------
// GFLT

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_gflt(const LatentGrid& z) {
  std::vector<std::uint8_t> out = {'G', 'F', 'L', 'T'};
  out.reserve(16 + z.values.size() * 4);
  put_u32(out, static_cast<std::uint32_t>(z.h));
  put_u32(out, static_cast<std::uint32_t>(z.w));
  put_u32(out, static_cast<std::uint32_t>(z.d));
  for (double v : z.values) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

LatentGrid decode_gflt(std::span<const std::uint8_t> b) {
  if (b.size() < 16 || std::memcmp(b.data(), "GFLT", 4) != 0) throw ValidationError("not a GFLT latent file");
  const std::uint32_t h = get_u32(b, 4), w = get_u32(b, 8), d = get_u32(b, 12);
  const std::uint64_t n = static_cast<std::uint64_t>(h) * w * d;
  if (b.size() != 16 + n * 4) throw ValidationError("GFLT payload size does not match header dims");
  LatentGrid z(static_cast<int>(h), static_cast<int>(w), static_cast<int>(d));
  for (std::uint64_t i = 0; i < n; ++i) z.values[i] = std::bit_cast<float>(get_u32(b, 16 + i * 4));
  return z;
}

void write_gflt(const std::filesystem::path& path, const LatentGrid& z) {
  const auto bytes = encode_gflt(z);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

LatentGrid read_gflt(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_gflt(bytes);
}

}  // namespace glyphforge::diffusion
