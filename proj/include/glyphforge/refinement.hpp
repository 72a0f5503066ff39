#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/image.hpp"
#include "glyphforge/segmentation.hpp"

namespace glyphforge::refine {

enum class CandidateKind { kOrigin = 0, kMask = 1, kRef = 2, kSty = 3 };
std::string_view to_string(CandidateKind k);

struct Candidate {
  CandidateKind kind = CandidateKind::kOrigin;
  Image image;
  std::string prompt;
  bool failed = false;
  std::string error;
};

// Always origin, mask, ref, sty in that order.
struct CandidatePool {
  std::array<Candidate, 4> entries;
};

// Image-to-image model. Implementations must be safe to call concurrently.
class RefinerBackend {
 public:
  virtual ~RefinerBackend() = default;
  // `mask` set: regenerate only where the mask is 0.
  virtual Image refine(const Image& img, std::string_view prompt, const seg::PixelMask* mask) const = 0;
  virtual std::string name() const = 0;
};

class IdentityRefiner final : public RefinerBackend {
 public:
  Image refine(const Image& img, std::string_view, const seg::PixelMask*) const override { return img; }
  std::string name() const override { return "identity"; }
};

// Fills the regenerated area with one color.
class SolidRefiner final : public RefinerBackend {
 public:
  explicit SolidRefiner(Rgb color) : color_(color) {}
  Image refine(const Image& img, std::string_view, const seg::PixelMask* mask) const override;
  std::string name() const override { return "solid"; }

 private:
  Rgb color_;
};

// Pulls the regenerated area a quarter of the way toward a color derived
// from the prompt hash. Pure function of (image, prompt, mask).
class DeterministicRefiner final : public RefinerBackend {
 public:
  Image refine(const Image& img, std::string_view prompt, const seg::PixelMask* mask) const override;
  std::string name() const override { return "deterministic"; }
};

// M*I + (1-M)*J, pixelwise.
Image mask_composite(const Image& origin, const Image& regenerated, const seg::PixelMask& m);

// origin: passthrough; mask: M*I + (1-M)*refiner(I|P); ref: refiner(I|P, M);
// sty: refiner(I|P', M). Refiner exceptions mark the candidate failed. The
// three refiner calls run concurrently when `parallel` is set.
CandidatePool build_candidate_pool(const Image& origin, const std::string& prompt, const std::string& style_prompt,
                                   const seg::PixelMask& mask, const RefinerBackend& refiner, bool parallel = true);

using JudgeFn = std::function<double(const Image&, std::string_view prompt)>;

struct Selection {
  CandidateKind kind = CandidateKind::kOrigin;
  double score = 0.0;
  std::array<std::optional<double>, 4> scores;  // nullopt for failed candidates
};

// Argmax of judge(I, P) over non-failed candidates; ties keep the earliest in
// pool order. Throws BackendError when every candidate failed.
Selection judge_select(const CandidatePool& pool, std::string_view prompt, const JudgeFn& judge);

struct RoundLog {
  int round = 0;
  std::string prompt_amended;
  std::array<std::optional<double>, 4> scores;
  CandidateKind selected = CandidateKind::kOrigin;
  bool converged = false;
};

std::string round_log_json(const std::vector<RoundLog>& log, int indent = 2);

struct RefineResult {
  Image best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<RoundLog> rounds;
};

// Produces P' from the current best image and P.
using StyleRefinerFn = std::function<std::string(const Image& current, const std::string& prompt)>;

inline constexpr double kConvergenceEps = 1e-3;
inline constexpr int kDefaultMaxRounds = 3;

// Each round: P' = style_refiner(I*, P), pool built from I*, judge_select.
// A round converges when its selected score beats the previous round's
// selected score by no more than eps (round 1 has no predecessor). The
// best-ever image is kept.
RefineResult refine_loop(const Image& initial, const std::string& prompt, const seg::PixelMask& mask,
                         const RefinerBackend& refiner, const StyleRefinerFn& style_refiner, const JudgeFn& judge,
                         int max_rounds = kDefaultMaxRounds, double eps = kConvergenceEps, bool parallel = true);

}  // namespace glyphforge::refine
