#include "glyphforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glyphforge/errors.hpp"
#include "glyphforge/rng.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge::metrics {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<double> seeded_vector(std::uint64_t seed, int dim) {
  Rng rng(seed);
  std::vector<double> v(dim);
  for (double& x : v) x = rng.gaussian();
  return v;
}

double norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

std::string normalize_text(std::string_view s) {
  std::string lowered;
  lowered.reserve(s.size());
  for (char32_t cp : text::decode_utf8(s)) text::append_utf8(lowered, text::to_lower(cp));
  return text::collapse_whitespace(lowered);
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(text::decode_utf8(a), text::decode_utf8(b));
}

double ocr_acc(const TextPair& p) {
  const auto t = text::decode_utf8(normalize_text(p.target));
  const auto r = text::decode_utf8(normalize_text(p.recognized));
  if (t.empty()) throw ValidationError("empty normalized target", "target");
  const double d = static_cast<double>(levenshtein(t, r));
  return std::max(0.0, 1.0 - d / static_cast<double>(t.size()));
}

double ocr_ned(const TextPair& p, double eps) {
  const auto t = text::decode_utf8(normalize_text(p.target));
  const auto r = text::decode_utf8(normalize_text(p.recognized));
  const double d = static_cast<double>(levenshtein(t, r));
  return std::max(0.0, 1.0 - d / (static_cast<double>(std::max(t.size(), r.size())) + eps));
}

double clip_rescale(double cos) {
  if (!std::isfinite(cos) || std::abs(cos) > 1.0 + 1e-6) throw ValidationError("cosine outside [-1, 1]", "cos");
  return 2.5 * std::max(cos, 0.0);
}

std::vector<double> HashEmbeddingScorer::embed_image(const Image& img) const {
  std::uint64_t h = fnv1a(&img.width, sizeof(img.width));
  h = fnv1a(&img.height, sizeof(img.height), h);
  h = fnv1a(img.data.data(), img.data.size(), h);
  return seeded_vector(h, dim_);
}

std::vector<double> HashEmbeddingScorer::embed_text(std::string_view text) const {
  return seeded_vector(fnv1a(text.data(), text.size()), dim_);
}

double clip_score(const Image& image, std::string_view prompt, const EmbeddingScorer& scorer) {
  const auto vi = scorer.embed_image(image);
  const auto vt = scorer.embed_text(std::string(kClipPrefix) + std::string(prompt));
  if (vi.size() != vt.size() || vi.empty()) throw BackendError("embedding scorer returned mismatched dimensions");
  const double ni = norm(vi), nt = norm(vt);
  if (ni == 0.0 || nt == 0.0) throw BackendError("embedding scorer returned a zero vector");
  const double cos = std::inner_product(vi.begin(), vi.end(), vt.begin(), 0.0) / (ni * nt);
  return clip_rescale(std::clamp(cos, -1.0, 1.0));
}

double vlm_score_normalize(double raw) {
  if (std::isnan(raw)) throw ValidationError("score is NaN");
  return std::clamp(raw, 0.0, 10.0) / 10.0;
}

double vqa_score(const Image& image, std::string_view prompt, const VqaBackend* backend) {
  if (backend == nullptr) throw BackendUnavailable("VQA backend not configured");
  return backend->score(image, prompt);
}

}  // namespace glyphforge::metrics
