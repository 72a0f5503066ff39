#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/image.hpp"

namespace glyphforge::metrics {

struct TextPair {
  std::string target;      // T
  std::string recognized;  // R
};

// Lowercase (Unicode-aware for Latin, Greek, Cyrillic, fullwidth), collapse whitespace, trim.
std::string normalize_text(std::string_view s);

// Edit distance over Unicode scalar values.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

// max(0, 1 - d / |N(T)|). Throws ValidationError for an empty normalized target.
double ocr_acc(const TextPair& p);

inline constexpr double kNedEpsilon = 1e-9;
// max(0, 1 - d / (max(|N(T)|, |N(R)|) + eps)).
double ocr_ned(const TextPair& p, double eps = kNedEpsilon);

// 2.5 * max(cos, 0). Throws ValidationError for |cos| > 1 + 1e-6.
double clip_rescale(double cos);

inline constexpr std::string_view kClipPrefix = "A photo depicts ";

class EmbeddingScorer {
 public:
  virtual ~EmbeddingScorer() = default;
  virtual std::vector<double> embed_image(const Image& img) const = 0;
  virtual std::vector<double> embed_text(std::string_view text) const = 0;
};

// Hash-seeded vectors: texts and images map to Gaussian vectors seeded by a
// digest of their content. Deterministic, offline.
class HashEmbeddingScorer final : public EmbeddingScorer {
 public:
  explicit HashEmbeddingScorer(int dim = 64) : dim_(dim) {}
  std::vector<double> embed_image(const Image& img) const override;
  std::vector<double> embed_text(std::string_view text) const override;

 private:
  int dim_;
};

// Scorer built from two callables; handy for scripted tests.
class FunctionEmbeddingScorer final : public EmbeddingScorer {
 public:
  using ImageFn = std::function<std::vector<double>(const Image&)>;
  using TextFn = std::function<std::vector<double>(std::string_view)>;
  FunctionEmbeddingScorer(ImageFn image, TextFn text) : image_(std::move(image)), text_(std::move(text)) {}
  std::vector<double> embed_image(const Image& img) const override { return image_(img); }
  std::vector<double> embed_text(std::string_view text) const override { return text_(text); }

 private:
  ImageFn image_;
  TextFn text_;
};

// Cosine of image and "A photo depicts " + prompt embeddings, rescaled.
double clip_score(const Image& image, std::string_view prompt, const EmbeddingScorer& scorer);

// clamp(raw, 0, 10) / 10
double vlm_score_normalize(double raw);

class VqaBackend {
 public:
  virtual ~VqaBackend() = default;
  virtual double score(const Image& image, std::string_view question) const = 0;
};

// Returns a fixed score and records the last question it received.
class ConstantVqaBackend final : public VqaBackend {
 public:
  explicit ConstantVqaBackend(double value) : value_(value) {}
  double score(const Image&, std::string_view question) const override {
    last_question_ = std::string(question);
    return value_;
  }
  const std::string& last_question() const noexcept { return last_question_; }

 private:
  double value_;
  mutable std::string last_question_;
};

// Passes the prompt verbatim. A null backend raises BackendUnavailable.
double vqa_score(const Image& image, std::string_view prompt, const VqaBackend* backend);

}  // namespace glyphforge::metrics
