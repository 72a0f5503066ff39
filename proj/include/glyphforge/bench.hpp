#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/diffusion.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/injection.hpp"
#include "glyphforge/metrics.hpp"
#include "glyphforge/refinement.hpp"
#include "glyphforge/typography_plan.hpp"
#include "glyphforge/vlm.hpp"

namespace glyphforge::bench {

struct BenchSample {
  std::string id;
  std::string subset;
  std::string language;  // en, zh, formula
  std::string prompt;
  std::vector<std::string> texts;
  std::optional<std::string> ref_image;
  std::optional<std::string> mask;
  std::string difficulty;

  friend bool operator==(const BenchSample&, const BenchSample&) = default;
};

// JSON-lines, one sample per line; blank lines are skipped. Errors carry the
// 1-based line number.
std::vector<BenchSample> parse_manifest(std::string_view jsonl);
std::vector<BenchSample> load_manifest(const std::filesystem::path& path);
// The six-sample fixture compiled into the library.
std::vector<BenchSample> builtin_fixture();

double round_to(double v, int decimals);

struct SubsetStats {
  std::string subset;
  std::size_t count = 0;
  double avg_text_len = 0.0;    // code points of the concatenated targets, 2 decimals
  double avg_prompt_len = 0.0;  // code points, 2 decimals
};

struct StatsTable {
  std::vector<SubsetStats> subsets;  // order of first appearance
  SubsetStats total;                 // "Total / Average"
};

StatsTable compute_stats(const std::vector<BenchSample>& samples);
std::string stats_to_text(const StatsTable& t);
std::string stats_to_json(const StatsTable& t, int indent = 2);

// 100 * (variant - baseline) / baseline, one decimal.
double ablation_improvement(double baseline_iou, double variant_iou);

struct PipelineConfig {
  std::uint64_t seed = 7;
  int steps = 20;
  int width = 128;
  int height = 128;
  int patch = 8;
  int grid_n = 5;
  inject::InjectionConfig inject;
  bool refine = true;
  int max_rounds = refine::kDefaultMaxRounds;
  int workers = 4;
  std::optional<std::filesystem::path> plan_override;  // typography plan JSON
};

struct Backends {
  std::shared_ptr<const vlm::VlmBackend> vlm;
  std::shared_ptr<const refine::RefinerBackend> refiner;
  render::FontRegistry registry = render::FontRegistry::builtin();

  static Backends mock();
};

struct PipelineResult {
  std::string id;
  bool ok = false;
  std::string failed_stage;
  std::string error;
  int exit_code = 0;  // 2 validation failure, 3 backend failure, 1 other
  Image final_image;
  std::filesystem::path run_dir;
  std::vector<std::string> warnings;
};

// Extraction -> draft + grid + plan -> injection -> refinement, every
// intermediate written under run_dir.
PipelineResult run_pipeline(const BenchSample& sample, const PipelineConfig& cfg, const Backends& backends,
                            const std::filesystem::path& run_dir);

// All samples, `cfg.workers` at a time, each into out_dir/<id>.
std::vector<PipelineResult> run_pipeline_all(const std::vector<BenchSample>& samples, const PipelineConfig& cfg,
                                             const Backends& backends, const std::filesystem::path& out_dir);

struct Scorers {
  // Recognized text for an image; empty function disables OCR metrics.
  std::function<std::string(const Image&, const BenchSample&)> ocr;
  std::shared_ptr<const metrics::EmbeddingScorer> clip;
  std::shared_ptr<const metrics::VqaBackend> vqa;
  std::shared_ptr<const vlm::VlmAgent> judge;  // style and faithfulness

  static Scorers mock(std::shared_ptr<const vlm::VlmBackend> vlm);
};

struct SampleRecord {
  std::string id;
  std::string subset;
  std::string status;  // ok, skipped, error
  std::string error;
  std::optional<double> ocr_acc, ocr_ned, clip, vqa, style, faith;
};

struct Aggregate {
  std::size_t included = 0;
  std::map<std::string, double> means;  // metric -> mean over samples that have it
  std::map<std::string, std::size_t> counts;
};

struct EvalReport {
  std::vector<SampleRecord> samples;
  std::map<std::string, Aggregate> subsets;
  Aggregate total;
  std::size_t skipped = 0;
  std::size_t errors = 0;
  std::map<std::string, std::string> config;
};

Aggregate aggregate(const std::vector<const SampleRecord*>& rows);

// Images are <image_dir>/<id>/refined.png, <image_dir>/<id>/injected.png or
// <image_dir>/<id>.png, first match wins.
std::optional<std::filesystem::path> find_sample_image(const std::filesystem::path& image_dir, const std::string& id);

EvalReport run_eval(const std::filesystem::path& image_dir, const std::vector<BenchSample>& samples,
                    const Scorers& scorers);
std::string report_to_json(const EvalReport& r, int indent = 2);

}  // namespace glyphforge::bench
