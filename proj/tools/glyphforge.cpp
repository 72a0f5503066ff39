// Command-line front end: render, inject, refine, eval, stats, ablate.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "glyphforge/bench.hpp"
#include "glyphforge/errors.hpp"
#include "glyphforge/glyph_renderer.hpp"
#include "glyphforge/segmentation.hpp"
#include "glyphforge/text.hpp"

namespace fs = std::filesystem;
using namespace glyphforge;

namespace {

struct Globals {
  std::uint64_t seed = 7;
  int steps = 20;
  std::string window = "0.2:0.8";
  double enhance = 2.0;
  double suppress = 0.1;
  bool no_fd = false;
  bool no_reweight = false;
  bool no_refine = false;
  bool mock = false;
  std::string fonts;
  std::string vlm_fixtures;
  int size = 128;
  int patch = 8;
  int workers = 4;
  int max_rounds = refine::kDefaultMaxRounds;
};

std::pair<double, double> parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ValidationError("expected start:end", "window");
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError("expected two numbers start:end", "window");
  }
}

render::FontRegistry registry_for(const Globals& g) {
  return g.fonts.empty() ? render::FontRegistry::builtin() : render::FontRegistry::load_config(g.fonts);
}

std::shared_ptr<const vlm::VlmBackend> vlm_for(const Globals& g) {
  if (g.mock) {
    auto m = std::make_shared<vlm::MockVlmBackend>();
    if (!g.vlm_fixtures.empty()) m->load_fixtures(g.vlm_fixtures);
    return m;
  }
  return std::make_shared<vlm::RemoteVlmBackend>(vlm::RemoteConfig::from_env());
}

bench::PipelineConfig pipeline_config(const Globals& g) {
  bench::PipelineConfig c;
  c.seed = g.seed;
  c.steps = g.steps;
  c.width = c.height = g.size;
  c.patch = g.patch;
  c.workers = g.workers;
  c.max_rounds = g.max_rounds;
  std::tie(c.inject.tau_start, c.inject.tau_end) = parse_window(g.window);
  c.inject.s_plus = g.enhance;
  c.inject.s_minus = g.suppress;
  c.inject.enable_fd = !g.no_fd;
  c.inject.enable_reweight = !g.no_reweight;
  c.inject.validate();
  return c;
}

std::vector<bench::BenchSample> samples_for(const std::string& manifest, const std::string& only) {
  auto samples = manifest.empty() ? bench::builtin_fixture() : bench::load_manifest(manifest);
  if (!only.empty()) {
    std::erase_if(samples, [&](const bench::BenchSample& s) { return s.id != only; });
    if (samples.empty()) throw ValidationError("no sample with id '" + only + "'", "sample");
  }
  return samples;
}

int run_pipeline_verb(const Globals& g, bool refine, const std::string& manifest, const std::string& out,
                      const std::string& only, const std::string& plan, const std::string& prompt) {
  auto cfg = pipeline_config(g);
  cfg.refine = refine && !g.no_refine;
  if (!plan.empty()) cfg.plan_override = plan;
  std::vector<bench::BenchSample> samples;
  if (!prompt.empty()) {
    bench::BenchSample s;
    s.id = "prompt";
    s.subset = "adhoc";
    s.language = "en";
    s.prompt = prompt;
    s.texts = {vlm::extract_quoted_text(prompt)};
    samples.push_back(std::move(s));
  } else {
    samples = samples_for(manifest, only);
  }
  bench::Backends backends;
  backends.vlm = vlm_for(g);
  backends.refiner = std::make_shared<refine::DeterministicRefiner>();
  backends.registry = registry_for(g);
  const auto results = bench::run_pipeline_all(samples, cfg, backends, out);
  int code = 0;
  for (const auto& r : results) {
    if (r.ok) {
      std::printf("%-16s ok     %s\n", r.id.c_str(), r.run_dir.string().c_str());
    } else {
      std::printf("%-16s FAILED [%s] %s\n", r.id.c_str(), r.failed_stage.c_str(), r.error.c_str());
      code = std::max(code, r.exit_code);
    }
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s: %s\n", r.id.c_str(), w.c_str());
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glyphforge: glyph-template injection engine and evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Sampling seed");
  app.add_option("--steps", g.steps, "Denoising steps N")->check(CLI::PositiveNumber);
  app.add_option("--window", g.window, "Injection window start:end as step fractions");
  app.add_option("--enhance", g.enhance, "Enhancement scale s+ (> 1)");
  app.add_option("--suppress", g.suppress, "Suppression scale s- in (0, 1)");
  app.add_flag("--no-fd", g.no_fd, "Disable frequency-decomposed blending");
  app.add_flag("--no-reweight", g.no_reweight, "Disable attention re-weighting");
  app.add_flag("--no-refine", g.no_refine, "Skip the refinement stage");
  app.add_flag("--mock", g.mock, "Use offline mock backends");
  app.add_option("--fonts", g.fonts, "Font registry config (TOML-style)");
  app.add_option("--vlm-fixtures", g.vlm_fixtures, "Scripted mock replies (JSON-lines)");
  app.add_option("--size", g.size, "Canvas size in pixels")->check(CLI::PositiveNumber);
  app.add_option("--patch", g.patch, "Latent patch size in pixels")->check(CLI::PositiveNumber);
  app.add_option("--workers", g.workers, "Samples processed in parallel")->check(CLI::PositiveNumber);
  app.add_option("--rounds", g.max_rounds, "Maximum refinement rounds")->check(CLI::PositiveNumber);

  // render
  auto* render_cmd = app.add_subcommand("render", "Render a glyph template and mask");
  std::string r_plan, r_text, r_out = "template_out";
  std::vector<double> r_bbox = {0.1, 0.1, 0.9, 0.9};
  bool r_plain_math = false;
  auto* plan_opt = render_cmd->add_option("--plan", r_plan, "Typography plan JSON");
  render_cmd->add_option("--text", r_text, "Content for a single region")->excludes(plan_opt);
  render_cmd->add_option("--bbox", r_bbox, "x_min y_min x_max y_max")->expected(4)->delimiter(',');
  render_cmd->add_flag("--plain-math", r_plain_math, "Disable the structured-math backend");
  render_cmd->add_option("--out", r_out, "Output directory");

  // inject / refine
  std::string p_manifest, p_out = "runs", p_sample, p_plan, p_prompt;
  auto add_pipeline_opts = [&](CLI::App* cmd) {
    cmd->add_option("--manifest", p_manifest, "Benchmark manifest (JSON-lines); default: built-in fixture");
    cmd->add_option("--out", p_out, "Run directory root");
    cmd->add_option("--sample", p_sample, "Only run the sample with this id");
    cmd->add_option("--plan", p_plan, "Typography plan override");
    cmd->add_option("--prompt", p_prompt, "Run a single ad-hoc prompt instead of a manifest");
  };
  auto* inject_cmd = app.add_subcommand("inject", "Run extraction, planning and glyph injection");
  add_pipeline_opts(inject_cmd);
  auto* refine_cmd = app.add_subcommand("refine", "Run the full pipeline including refinement");
  add_pipeline_opts(refine_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score generated images against a manifest");
  std::string e_dir, e_manifest, e_out;
  bool e_perfect_ocr = false;
  eval_cmd->add_option("--run-dir", e_dir, "Run directory or image folder")->required();
  eval_cmd->add_option("--manifest", e_manifest, "Benchmark manifest; default: built-in fixture");
  eval_cmd->add_option("--out", e_out, "Write the report here instead of stdout");
  eval_cmd->add_flag("--perfect-ocr", e_perfect_ocr, "Mock OCR that returns the target text");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Benchmark statistics per subset");
  std::string s_manifest;
  bool s_json = false;
  stats_cmd->add_option("--manifest", s_manifest, "Benchmark manifest; default: built-in fixture");
  stats_cmd->add_flag("--json", s_json, "Emit JSON");

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "Relative IoU improvement of a variant over a baseline");
  double a_base = 0, a_var = 0;
  ablate_cmd->add_option("baseline", a_base, "Baseline mean IoU")->required();
  ablate_cmd->add_option("variant", a_var, "Variant mean IoU")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*render_cmd) {
      const auto registry = registry_for(g);
      plan::TypographyPlan p;
      if (!r_plan.empty()) {
        std::ifstream f(r_plan, std::ios::binary);
        if (!f) throw ValidationError("cannot open " + r_plan, "plan");
        p = plan::parse_plan(std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>()));
      } else {
        if (r_text.empty()) throw ValidationError("either --plan or --text is required", "text");
        plan::TextRegion r;
        r.content = r_text;
        r.bbox = {r_bbox[0], r_bbox[1], r_bbox[2], r_bbox[3]};
        p.text_regions.push_back(r);
        plan::validate(p);
      }
      render::RenderOptions opts;
      opts.structured_math = !r_plain_math;
      const auto tpl = render::render_plan(p, g.size, g.size, registry, opts);
      fs::create_directories(r_out);
      write_png(fs::path(r_out) / "template.png", tpl.image);
      write_png(fs::path(r_out) / "mask.png", tpl.mask);
      std::ofstream(fs::path(r_out) / "plan.json") << plan::serialize_plan(p) << "\n";
      for (const auto& reg : tpl.regions) {
        std::printf("region \"%s\": backend=%s lines=%zu font_px=%d%s\n", reg.region.content.c_str(),
                    reg.backend.c_str(), reg.lines.size(), reg.font_px, reg.fallback_used ? " (fallback)" : "");
        for (const auto& w : reg.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      }
      return 0;
    }
    if (*inject_cmd) return run_pipeline_verb(g, false, p_manifest, p_out, p_sample, p_plan, p_prompt);
    if (*refine_cmd) return run_pipeline_verb(g, true, p_manifest, p_out, p_sample, p_plan, p_prompt);
    if (*eval_cmd) {
      const auto samples = samples_for(e_manifest, "");
      auto scorers = bench::Scorers::mock(vlm_for(g));
      if (e_perfect_ocr) scorers.ocr = [](const Image&, const bench::BenchSample& s) {
        std::string t;
        for (const auto& x : s.texts) t += (t.empty() ? "" : " ") + x;
        return t;
      };
      const auto rep = bench::run_eval(e_dir, samples, scorers);
      const std::string js = bench::report_to_json(rep) + "\n";
      if (e_out.empty()) {
        std::fwrite(js.data(), 1, js.size(), stdout);
      } else {
        std::ofstream(e_out, std::ios::binary) << js;
      }
      return 0;
    }
    if (*stats_cmd) {
      const auto t = bench::compute_stats(samples_for(s_manifest, ""));
      std::fputs((s_json ? bench::stats_to_json(t) + "\n" : bench::stats_to_text(t)).c_str(), stdout);
      return 0;
    }
    if (*ablate_cmd) {
      std::printf("%.1f\n", bench::ablation_improvement(a_base, a_var));
      return 0;
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const BackendError& e) {
    std::fprintf(stderr, "backend error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
