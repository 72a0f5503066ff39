#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "glyphforge/errors.hpp"
#include "glyphforge/refinement.hpp"

using namespace glyphforge;
using namespace glyphforge::refine;

namespace {

Image test_image() {
  Image img(8, 8, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<std::uint8_t>(i * 7);
  return img;
}

seg::PixelMask half_mask() {
  seg::PixelMask m(8, 8, 0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 4; ++x) m.at(x, y) = 1;
  return m;
}

class ThrowingRefiner final : public RefinerBackend {
 public:
  explicit ThrowingRefiner(std::string bad_prompt) : bad_(std::move(bad_prompt)) {}
  Image refine(const Image& img, std::string_view prompt, const seg::PixelMask*) const override {
    if (prompt == bad_) throw BackendError("refiner exploded");
    return img;
  }
  std::string name() const override { return "throwing"; }

 private:
  std::string bad_;
};

// Scores candidates in pool order from a script: call k gets script[k].
JudgeFn scripted(std::vector<double> script) {
  auto calls = std::make_shared<std::size_t>(0);
  return [script = std::move(script), calls](const Image&, std::string_view) {
    const double v = script.at(*calls);
    ++*calls;
    return v;
  };
}

CandidatePool pool_with(const Image& img) {
  CandidatePool p;
  for (int i = 0; i < 4; ++i) {
    p.entries[i].kind = static_cast<CandidateKind>(i);
    p.entries[i].image = img;
  }
  return p;
}

}  // namespace

TEST(CandidatePool, IdentityRefinerGivesFourCopiesInOrder) {
  const Image img = test_image();
  const auto pool = build_candidate_pool(img, "P", "P'", half_mask(), IdentityRefiner{});
  const char* names[] = {"origin", "mask", "ref", "sty"};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(pool.entries[i].kind, static_cast<CandidateKind>(i));
    EXPECT_EQ(to_string(pool.entries[i].kind), names[i]);
    EXPECT_EQ(pool.entries[i].image, img);
    EXPECT_FALSE(pool.entries[i].failed);
  }
  EXPECT_EQ(pool.entries[3].prompt, "P'");
  EXPECT_EQ(pool.entries[2].prompt, "P");
}

TEST(CandidatePool, MaskCompositeRule) {
  const Image img = test_image();
  const SolidRefiner gray({128, 128, 128});
  const auto ones = build_candidate_pool(img, "P", "Q", seg::PixelMask(8, 8, 1), gray);
  EXPECT_EQ(ones.entries[1].image, img);
  const auto zeros = build_candidate_pool(img, "P", "Q", seg::PixelMask(8, 8, 0), gray);
  EXPECT_EQ(zeros.entries[1].image, Image::filled(8, 8, {128, 128, 128}));

  const auto half = build_candidate_pool(img, "P", "Q", half_mask(), gray);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      const Rgb want = x < 4 ? img.rgb(x, y) : Rgb{128, 128, 128};
      EXPECT_EQ(half.entries[1].image.rgb(x, y), want);
    }
}

TEST(CandidatePool, MaskedRefinersKeepGlyphPixels) {
  const Image img = test_image();
  const auto pool = build_candidate_pool(img, "P", "Q", half_mask(), DeterministicRefiner{});
  for (int k : {2, 3}) {
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 4; ++x) EXPECT_EQ(pool.entries[k].image.rgb(x, y), img.rgb(x, y));
  }
  EXPECT_NE(pool.entries[2].image, pool.entries[3].image);  // prompt-dependent tint
  const auto again = build_candidate_pool(img, "P", "Q", half_mask(), DeterministicRefiner{}, false);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(again.entries[k].image, pool.entries[k].image);
}

TEST(CandidatePool, RefinerFailureMarksCandidate) {
  const auto pool = build_candidate_pool(test_image(), "P", "bad", half_mask(), ThrowingRefiner("bad"));
  EXPECT_FALSE(pool.entries[2].failed);
  EXPECT_TRUE(pool.entries[3].failed);
  EXPECT_NE(pool.entries[3].error.find("exploded"), std::string::npos);
}

TEST(CandidatePool, MaskSizeMismatch) {
  EXPECT_THROW(build_candidate_pool(test_image(), "P", "Q", seg::PixelMask(4, 4, 0), IdentityRefiner{}),
               ValidationError);
}

TEST(JudgeSelect, ArgmaxTieAndExclusion) {
  const auto pool = pool_with(test_image());
  auto sel = judge_select(pool, "P", scripted({0.5, 0.7, 0.6, 0.65}));
  EXPECT_EQ(sel.kind, CandidateKind::kMask);
  EXPECT_EQ(sel.score, 0.7);
  sel = judge_select(pool, "P", scripted({0.4, 0.4, 0.4, 0.4}));
  EXPECT_EQ(sel.kind, CandidateKind::kOrigin);

  auto failing = pool;
  failing.entries[1].failed = true;
  // failed entry is never scored: the script lists only the three live candidates
  sel = judge_select(failing, "P", scripted({0.5, 0.6, 0.65}));
  EXPECT_EQ(sel.kind, CandidateKind::kSty);
  EXPECT_FALSE(sel.scores[1].has_value());

  for (auto& e : failing.entries) e.failed = true;
  EXPECT_THROW(judge_select(failing, "P", scripted({})), BackendError);
}

TEST(JudgeSelect, InvariantUnderIncreasingTransform) {
  const auto pool = pool_with(test_image());
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(4);
    for (auto& v : s) v = static_cast<double>(rng() % 5) / 4.0;
    std::vector<double> t(4);
    for (int i = 0; i < 4; ++i) t[i] = std::exp(3 * s[i]) - 7.0;
    EXPECT_EQ(judge_select(pool, "P", scripted(s)).kind, judge_select(pool, "P", scripted(t)).kind);
  }
}

TEST(RefineLoop, SingleRoundBuildsOnePool) {
  int style_calls = 0;
  const auto res = refine_loop(
      test_image(), "P", half_mask(), IdentityRefiner{},
      [&](const Image&, const std::string& p) { ++style_calls; return p + " styled"; }, scripted({0.1, 0.2, 0.3, 0.4}),
      1);
  EXPECT_EQ(style_calls, 1);
  ASSERT_EQ(res.rounds.size(), 1u);
  EXPECT_FALSE(res.rounds[0].converged);
  EXPECT_EQ(res.rounds[0].selected, CandidateKind::kSty);
  EXPECT_EQ(res.rounds[0].prompt_amended, "P styled");
}

TEST(RefineLoop, DecreasingScoresStopAfterRoundTwo) {
  // round 1 best 0.9, round 2 best 0.5: no improvement
  const auto res = refine_loop(test_image(), "P", half_mask(), DeterministicRefiner{},
                               [](const Image&, const std::string& p) { return p; },
                               scripted({0.1, 0.9, 0.2, 0.3, 0.5, 0.1, 0.1, 0.1, 0.0, 0.0, 0.0, 0.0}), 3);
  ASSERT_EQ(res.rounds.size(), 2u);
  EXPECT_TRUE(res.rounds[1].converged);
  EXPECT_EQ(res.best_score, 0.9);
  EXPECT_EQ(res.rounds[0].selected, CandidateKind::kMask);
}

TEST(RefineLoop, BestEverRetainedAndCapRespected) {
  // scores improve each round by more than eps, so the cap stops the loop
  const auto res = refine_loop(test_image(), "P", half_mask(), DeterministicRefiner{},
                               [](const Image&, const std::string& p) { return p; },
                               scripted({0.1, 0.2, 0.3, 0.4, 0.5, 0.1, 0.1, 0.1, 0.1, 0.1, 0.9, 0.1}), 3);
  ASSERT_EQ(res.rounds.size(), 3u);
  EXPECT_EQ(res.best_score, 0.9);
  double best = -1;
  for (const auto& r : res.rounds) {
    double top = -1;
    for (const auto& s : r.scores) top = std::max(top, s.value_or(-1));
    best = std::max(best, top);
  }
  EXPECT_EQ(best, res.best_score);
}

TEST(RefineLoop, ConstantJudgeTerminatesAfterSecondRound) {
  const auto res = refine_loop(test_image(), "P", half_mask(), IdentityRefiner{},
                               [](const Image&, const std::string& p) { return p; },
                               [](const Image&, std::string_view) { return 0.5; }, 5);
  ASSERT_EQ(res.rounds.size(), 2u);
  EXPECT_TRUE(res.rounds[1].converged);
  EXPECT_EQ(res.best, test_image());
}

TEST(RefineLoop, RoundLogJson) {
  RoundLog r;
  r.round = 1;
  r.prompt_amended = "x";
  r.scores = {0.5, std::nullopt, 0.25, 1.0};
  r.selected = CandidateKind::kSty;
  EXPECT_EQ(round_log_json({r}, -1),
            R"([{"converged":false,"prompt_amended":"x","round":1,"scores":[0.5,null,0.25,1.0],"selected":"sty"}])");
}
