#include "glyphforge/refinement.hpp"

#include <future>
#include <nlohmann/json.hpp>

#include "glyphforge/errors.hpp"

namespace glyphforge::refine {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void check_mask(const Image& img, const seg::PixelMask* mask) {
  if (mask != nullptr && (mask->width != img.width || mask->height != img.height)) {
    throw ShapeError("mask and image sizes differ");
  }
}

template <typename F>
Image map_unmasked(const Image& src, const seg::PixelMask* mask, F f) {
  check_mask(src, mask);
  Image img = to_rgb(src);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (mask != nullptr && mask->at(x, y)) continue;
      img.set_rgb(x, y, f(img.rgb(x, y)));
    }
  }
  return img;
}

}  // namespace

std::string_view to_string(CandidateKind k) {
  switch (k) {
    case CandidateKind::kOrigin: return "origin";
    case CandidateKind::kMask: return "mask";
    case CandidateKind::kRef: return "ref";
    case CandidateKind::kSty: return "sty";
  }
  return "?";
}

Image SolidRefiner::refine(const Image& img, std::string_view, const seg::PixelMask* mask) const {
  return map_unmasked(img, mask, [this](Rgb) { return color_; });
}

Image DeterministicRefiner::refine(const Image& img, std::string_view prompt, const seg::PixelMask* mask) const {
  const std::uint64_t h = fnv1a(prompt);
  const Rgb tint{static_cast<std::uint8_t>(h), static_cast<std::uint8_t>(h >> 8), static_cast<std::uint8_t>(h >> 16)};
  return map_unmasked(img, mask, [tint](Rgb p) {
    return Rgb{static_cast<std::uint8_t>((3 * p.r + tint.r + 2) / 4), static_cast<std::uint8_t>((3 * p.g + tint.g + 2) / 4),
               static_cast<std::uint8_t>((3 * p.b + tint.b + 2) / 4)};
  });
}

Image mask_composite(const Image& origin, const Image& regenerated, const seg::PixelMask& m) {
  if (origin.width != regenerated.width || origin.height != regenerated.height) {
    throw ShapeError("refiner changed the image size");
  }
  check_mask(origin, &m);
  const Image a = to_rgb(origin), b = to_rgb(regenerated);
  Image out = b;
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      if (m.at(x, y)) out.set_rgb(x, y, a.rgb(x, y));
    }
  }
  return out;
}

CandidatePool build_candidate_pool(const Image& origin, const std::string& prompt, const std::string& style_prompt,
                                   const seg::PixelMask& mask, const RefinerBackend& refiner, bool parallel) {
  check_mask(origin, &mask);
  CandidatePool pool;
  pool.entries[0] = {CandidateKind::kOrigin, origin, prompt, false, {}};

  auto job_mask = [&] { return mask_composite(origin, refiner.refine(origin, prompt, nullptr), mask); };
  auto job_ref = [&] { return refiner.refine(origin, prompt, &mask); };
  auto job_sty = [&] { return refiner.refine(origin, style_prompt, &mask); };
  const std::launch policy = parallel ? std::launch::async : std::launch::deferred;
  std::array<std::future<Image>, 3> futures = {std::async(policy, job_mask), std::async(policy, job_ref),
                                                std::async(policy, job_sty)};
  const std::array<std::string, 3> prompts = {prompt, prompt, style_prompt};
  for (int i = 0; i < 3; ++i) {
    Candidate& c = pool.entries[i + 1];
    c.kind = static_cast<CandidateKind>(i + 1);
    c.prompt = prompts[i];
    try {
      c.image = futures[i].get();
      if (c.image.width != origin.width || c.image.height != origin.height) {
        throw ShapeError("refiner changed the image size");
      }
    } catch (const std::exception& e) {
      c.failed = true;
      c.error = e.what();
      c.image = Image();
    }
  }
  return pool;
}

Selection judge_select(const CandidatePool& pool, std::string_view prompt, const JudgeFn& judge) {
  Selection sel;
  bool any = false;
  for (int i = 0; i < 4; ++i) {
    const Candidate& c = pool.entries[i];
    if (c.failed) continue;
    const double s = judge(c.image, prompt);
    sel.scores[i] = s;
    if (!any || s > sel.score) {
      sel.score = s;
      sel.kind = c.kind;
      any = true;
    }
  }
  if (!any) throw BackendError("every refinement candidate failed");
  return sel;
}

std::string round_log_json(const std::vector<RoundLog>& log, int indent) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : log) {
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& s : r.scores) scores.push_back(s ? nlohmann::json(*s) : nlohmann::json(nullptr));
    arr.push_back({{"round", r.round},
                   {"prompt_amended", r.prompt_amended},
                   {"scores", std::move(scores)},
                   {"selected", std::string(to_string(r.selected))},
                   {"converged", r.converged}});
  }
  return arr.dump(indent);
}

RefineResult refine_loop(const Image& initial, const std::string& prompt, const seg::PixelMask& mask,
                         const RefinerBackend& refiner, const StyleRefinerFn& style_refiner, const JudgeFn& judge,
                         int max_rounds, double eps, bool parallel) {
  if (max_rounds < 1) throw ValidationError("max_rounds must be >= 1", "max_rounds");
  RefineResult res;
  res.best = initial;
  std::optional<double> previous;
  for (int round = 1; round <= max_rounds; ++round) {
    RoundLog log;
    log.round = round;
    log.prompt_amended = style_refiner(res.best, prompt);
    const CandidatePool pool = build_candidate_pool(res.best, prompt, log.prompt_amended, mask, refiner, parallel);
    const Selection sel = judge_select(pool, prompt, judge);
    log.scores = sel.scores;
    log.selected = sel.kind;
    log.converged = previous.has_value() && sel.score - *previous <= eps;
    if (sel.score > res.best_score) {
      res.best_score = sel.score;
      res.best = pool.entries[static_cast<int>(sel.kind)].image;
    }
    previous = sel.score;
    res.rounds.push_back(std::move(log));
    if (res.rounds.back().converged) break;
  }
  return res;
}

}  // namespace glyphforge::refine
