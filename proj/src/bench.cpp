#include "glyphforge/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>

#include "glyphforge/errors.hpp"
#include "glyphforge/resources.hpp"
#include "glyphforge/rng.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamDraft = 100;
constexpr std::uint64_t kCodecSeed = 0x6c79;
constexpr std::uint64_t kModelSeed = 0x7a11;

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

void write_text(const fs::path& p, std::string_view s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

Image resize_nearest(const Image& src, int w, int h) {
  if (src.width == w && src.height == h) return src;
  Image out(w, h, src.channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int sx = static_cast<int>(static_cast<long long>(x) * src.width / w);
      const int sy = static_cast<int>(static_cast<long long>(y) * src.height / h);
      for (int c = 0; c < src.channels; ++c) out.at(x, y, c) = src.at(sx, sy, c);
    }
  }
  return out;
}

std::vector<int> prompt_token_ids(std::string_view prompt) {
  std::vector<int> ids;
  for (const auto& t : diffusion::tokenize(prompt)) ids.push_back(diffusion::token_bucket(t.text));
  return ids;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

std::vector<BenchSample> parse_manifest(std::string_view jsonl) {
  std::vector<BenchSample> out;
  std::set<std::string> ids;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < jsonl.size()) {
    auto nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    const std::string line = text::trim(jsonl.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw ValidationError("malformed JSON", where);
    }
    BenchSample s;
    try {
      s.id = j.at("id").get<std::string>();
      s.subset = j.at("subset").get<std::string>();
      s.language = j.at("language").get<std::string>();
      s.prompt = j.at("prompt").get<std::string>();
      s.texts = j.at("texts").get<std::vector<std::string>>();
      s.ref_image = optional_string(j, "ref_image");
      s.mask = optional_string(j, "mask");
      s.difficulty = j.value("difficulty", "");
    } catch (const json::exception& e) {
      throw ValidationError(std::string("bad sample: ") + e.what(), where);
    }
    if (s.id.empty()) throw ValidationError("empty id", where);
    if (s.language != "en" && s.language != "zh" && s.language != "formula") {
      throw ValidationError("language must be en, zh or formula", where);
    }
    if (s.texts.empty()) throw ValidationError("texts must be non-empty", where);
    if (!ids.insert(s.id).second) throw ValidationError("duplicate id '" + s.id + "'", where);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<BenchSample> load_manifest(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open manifest " + path.string(), "manifest");
  const std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_manifest(data);
}

std::vector<BenchSample> builtin_fixture() { return parse_manifest(resources::get("fixtures/manifest.jsonl")); }

// ---------------------------------------------------------------------------
// Stats and ablation arithmetic

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

StatsTable compute_stats(const std::vector<BenchSample>& samples) {
  struct Acc {
    std::size_t n = 0;
    double text = 0, prompt = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  Acc total;
  for (const auto& s : samples) {
    if (!acc.count(s.subset)) order.push_back(s.subset);
    Acc& a = acc[s.subset];
    const double tl = static_cast<double>(text::codepoint_count(join(s.texts, "")));
    const double pl = static_cast<double>(text::codepoint_count(s.prompt));
    for (Acc* x : {&a, &total}) {
      x->n += 1;
      x->text += tl;
      x->prompt += pl;
    }
  }
  auto row = [](const std::string& name, const Acc& a) {
    SubsetStats r;
    r.subset = name;
    r.count = a.n;
    if (a.n) {
      r.avg_text_len = round_to(a.text / static_cast<double>(a.n), 2);
      r.avg_prompt_len = round_to(a.prompt / static_cast<double>(a.n), 2);
    }
    return r;
  };
  StatsTable t;
  for (const auto& name : order) t.subsets.push_back(row(name, acc[name]));
  t.total = row("Total / Average", total);
  return t;
}

std::string stats_to_text(const StatsTable& t) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-32s %6s %12s %14s\n", "Subset", "Num.", "Avg.|Text|", "Avg.|Prompt|");
  out += buf;
  auto line = [&](const SubsetStats& r) {
    std::snprintf(buf, sizeof(buf), "%-32s %6zu %12.2f %14.2f\n", r.subset.c_str(), r.count, r.avg_text_len,
                  r.avg_prompt_len);
    out += buf;
  };
  for (const auto& r : t.subsets) line(r);
  line(t.total);
  return out;
}

std::string stats_to_json(const StatsTable& t, int indent) {
  auto row = [](const SubsetStats& r) {
    return json{{"subset", r.subset}, {"count", r.count}, {"avg_text_len", r.avg_text_len},
                {"avg_prompt_len", r.avg_prompt_len}};
  };
  json subsets = json::array();
  for (const auto& r : t.subsets) subsets.push_back(row(r));
  return json{{"subsets", subsets}, {"total", row(t.total)}}.dump(indent);
}

double ablation_improvement(double baseline_iou, double variant_iou) {
  if (!(baseline_iou > 0.0)) throw ValidationError("baseline IoU must be > 0", "baseline");
  return round_to(100.0 * (variant_iou - baseline_iou) / baseline_iou, 1);
}

// ---------------------------------------------------------------------------
// Pipeline

Backends Backends::mock() {
  Backends b;
  b.vlm = std::make_shared<vlm::MockVlmBackend>();
  b.refiner = std::make_shared<refine::DeterministicRefiner>();
  return b;
}

PipelineResult run_pipeline(const BenchSample& sample, const PipelineConfig& cfg, const Backends& backends,
                            const fs::path& run_dir) {
  PipelineResult res;
  res.id = sample.id;
  res.run_dir = run_dir;
  std::string stage = "setup";
  json manifest = {{"id", sample.id},
                   {"subset", sample.subset},
                   {"prompt", sample.prompt},
                   {"seed", cfg.seed},
                   {"steps", cfg.steps},
                   {"size", {cfg.width, cfg.height}},
                   {"patch", cfg.patch},
                   {"window", {cfg.inject.tau_start, cfg.inject.tau_end}},
                   {"enhance", cfg.inject.s_plus},
                   {"suppress", cfg.inject.s_minus},
                   {"blur_sigma", cfg.inject.blur_sigma},
                   {"theta", cfg.inject.theta},
                   {"fd", cfg.inject.enable_fd},
                   {"reweight", cfg.inject.enable_reweight},
                   {"refine", cfg.refine},
                   {"codec_seed", kCodecSeed},
                   {"model_seed", kModelSeed}};
  std::vector<std::string> files;
  auto save_png = [&](const std::string& name, const Image& img) {
    write_png(run_dir / name, img);
    files.push_back(name);
  };
  auto save_text = [&](const std::string& name, std::string_view s) {
    write_text(run_dir / name, s);
    files.push_back(name);
  };
  try {
    fs::create_directories(run_dir);
    cfg.inject.validate();
    if (!backends.vlm) throw BackendUnavailable("no VLM backend configured");
    const vlm::VlmAgent agent(backends.vlm);
    const diffusion::Codec codec(cfg.patch, 4, kCodecSeed);
    const diffusion::ToyDenoiser model(diffusion::DenoiserConfig{.seed = kModelSeed});
    const auto schedule = diffusion::make_schedule(cfg.steps);

    stage = "extraction";
    std::vector<std::string> targets;
    for (const auto& sp : text::find_quoted_spans(sample.prompt)) {
      std::string t = text::collapse_whitespace(std::string_view(sample.prompt).substr(sp.begin, sp.end - sp.begin));
      if (!t.empty()) targets.push_back(std::move(t));
    }
    if (targets.empty()) targets = sample.texts;
    manifest["targets"] = targets;
    manifest["target_text"] = vlm::extract_quoted_text(sample.prompt);

    stage = "draft";
    const std::string clean = agent.clean_prompt(sample.prompt);
    manifest["clean_prompt"] = clean;
    Image draft;
    if (sample.ref_image) {
      draft = resize_nearest(to_rgb(read_png(*sample.ref_image)), cfg.width, cfg.height);
    } else {
      diffusion::LatentGrid shape((cfg.height + cfg.patch - 1) / cfg.patch, (cfg.width + cfg.patch - 1) / cfg.patch, 4);
      shape.patch = cfg.patch;
      shape.src_w = cfg.width;
      shape.src_h = cfg.height;
      const auto z_n = diffusion::gaussian_like(shape, derive_seed(cfg.seed, kStreamDraft));
      draft = codec.decode(diffusion::sample_plain(model, z_n, schedule, prompt_token_ids(clean)));
    }
    save_png("draft.png", draft);
    const Image grid = plan::overlay_grid(draft, cfg.grid_n);
    save_png("draft_grid.png", grid);

    stage = "plan";
    plan::TypographyPlan tplan;
    if (cfg.plan_override) {
      std::ifstream f(*cfg.plan_override, std::ios::binary);
      if (!f) throw ValidationError("cannot open plan " + cfg.plan_override->string(), "plan");
      tplan = plan::parse_plan(std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>()));
    } else {
      tplan = agent.analyze_typography(grid, targets, backends.registry);
    }
    save_text("plan.json", plan::serialize_plan(tplan) + "\n");

    stage = "render";
    const auto tpl = render::render_plan(tplan, cfg.width, cfg.height, backends.registry);
    for (const auto& r : tpl.regions) res.warnings.insert(res.warnings.end(), r.warnings.begin(), r.warnings.end());
    save_png("template.png", tpl.image);

    stage = "injection";
    const auto inj = inject::run_injection(tpl.image, tpl.background, sample.prompt, cfg.inject, cfg.steps, cfg.seed,
                                           codec, model);
    save_png("mask.png", inj.pixel_mask.to_image());
    write_gflt(run_dir / "latent_z0.gflt", inj.z0);
    files.push_back("latent_z0.gflt");
    save_text("trace.jsonl", inject::trace_to_jsonl(inj.trace));
    manifest["otsu_threshold"] = inj.otsu;
    manifest["token_grid"] = {inj.token_mask.h, inj.token_mask.w};
    manifest["token_mask"] = inj.token_mask.bitstring();
    manifest["text_token_indices"] = inj.sets.txt;
    const Image injected = codec.decode(inj.z0);
    save_png("injected.png", injected);
    res.final_image = injected;

    if (cfg.refine) {
      stage = "refinement";
      if (!backends.refiner) throw BackendUnavailable("no refiner backend configured");
      const auto style_fn = [&](const Image&, const std::string&) { return agent.style_prompt(tplan.image_analysis); };
      const auto judge = [&](const Image& img, std::string_view p) { return agent.score_image(img, std::string(p)); };
      const auto rr = refine::refine_loop(injected, sample.prompt, inj.pixel_mask, *backends.refiner, style_fn, judge,
                                          cfg.max_rounds);
      save_text("refine_log.json", refine::round_log_json(rr.rounds) + "\n");
      save_png("refined.png", rr.best);
      manifest["refine_best_score"] = rr.best_score;
      res.final_image = rr.best;
    }
    res.ok = true;
  } catch (const ValidationError& e) {
    res.failed_stage = stage;
    res.error = e.what();
    res.exit_code = 2;
  } catch (const BackendError& e) {
    res.failed_stage = stage;
    res.error = e.what();
    res.exit_code = 3;
  } catch (const std::exception& e) {
    res.failed_stage = stage;
    res.error = e.what();
    res.exit_code = 1;
  }

  manifest["warnings"] = res.warnings;
  manifest["files"] = files;
  json report = {{"schema", 1},
                 {"id", sample.id},
                 {"ok", res.ok},
                 {"final", res.ok ? (cfg.refine ? "refined.png" : "injected.png") : ""}};
  if (!res.ok) report["failed_stage"] = res.failed_stage, report["error"] = res.error;
  try {
    write_text(run_dir / "manifest.json", manifest.dump(2) + "\n");
    write_text(run_dir / "report.json", report.dump(2) + "\n");
  } catch (const std::exception& e) {
    if (res.ok) {
      res.ok = false;
      res.failed_stage = "output";
      res.error = e.what();
      res.exit_code = 1;
    }
  }
  return res;
}

std::vector<PipelineResult> run_pipeline_all(const std::vector<BenchSample>& samples, const PipelineConfig& cfg,
                                             const Backends& backends, const fs::path& out_dir) {
  std::vector<PipelineResult> results(samples.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(samples.size())));
  auto work = [&] {
    for (std::size_t i = next++; i < samples.size(); i = next++) {
      results[i] = run_pipeline(samples[i], cfg, backends, out_dir / samples[i].id);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return results;
}

// ---------------------------------------------------------------------------
// Evaluation

Scorers Scorers::mock(std::shared_ptr<const vlm::VlmBackend> backend) {
  Scorers s;
  auto agent = std::make_shared<const vlm::VlmAgent>(std::move(backend));
  s.ocr = [agent](const Image& img, const BenchSample&) { return agent->ocr(img); };
  s.clip = std::make_shared<metrics::HashEmbeddingScorer>();
  s.judge = agent;
  return s;
}

Aggregate aggregate(const std::vector<const SampleRecord*>& rows) {
  Aggregate a;
  std::map<std::string, double> sums;
  for (const SampleRecord* r : rows) {
    if (r->status != "ok") continue;
    ++a.included;
    const std::pair<const char*, const std::optional<double>*> fields[] = {
        {"ocr_acc", &r->ocr_acc}, {"ocr_ned", &r->ocr_ned}, {"clip", &r->clip},
        {"vqa", &r->vqa},         {"style", &r->style},     {"faith", &r->faith}};
    for (const auto& [name, v] : fields) {
      if (!v->has_value()) continue;
      sums[name] += **v;
      a.counts[name] += 1;
    }
  }
  for (const auto& [name, sum] : sums) a.means[name] = sum / static_cast<double>(a.counts[name]);
  return a;
}

std::optional<fs::path> find_sample_image(const fs::path& dir, const std::string& id) {
  for (const fs::path& p : {dir / id / "refined.png", dir / id / "injected.png", dir / (id + ".png")}) {
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

EvalReport run_eval(const fs::path& image_dir, const std::vector<BenchSample>& samples, const Scorers& scorers) {
  EvalReport rep;
  rep.config["image_dir"] = image_dir.string();
  rep.config["ocr"] = scorers.ocr ? "on" : "off";
  rep.config["clip"] = scorers.clip ? "on" : "off";
  rep.config["vqa"] = scorers.vqa ? "on" : "off";
  rep.config["judge"] = scorers.judge ? scorers.judge->backend().identity() : "off";
  for (const auto& s : samples) {
    SampleRecord r;
    r.id = s.id;
    r.subset = s.subset;
    const auto path = find_sample_image(image_dir, s.id);
    if (!path) {
      r.status = "skipped";
      r.error = "image not found";
      ++rep.skipped;
      rep.samples.push_back(std::move(r));
      continue;
    }
    try {
      const Image img = read_png(*path);
      if (scorers.ocr) {
        const metrics::TextPair pair{join(s.texts, " "), scorers.ocr(img, s)};
        r.ocr_acc = metrics::ocr_acc(pair);
        r.ocr_ned = metrics::ocr_ned(pair);
      }
      if (scorers.clip) r.clip = metrics::clip_score(img, s.prompt, *scorers.clip);
      if (scorers.vqa) r.vqa = metrics::vqa_score(img, s.prompt, scorers.vqa.get());
      if (scorers.judge) {
        r.style = scorers.judge->style_score(img);
        r.faith = scorers.judge->faithfulness_score(img, s.prompt);
      }
      r.status = "ok";
    } catch (const std::exception& e) {
      r = SampleRecord{s.id, s.subset, "error", e.what(), {}, {}, {}, {}, {}, {}};
      ++rep.errors;
    }
    rep.samples.push_back(std::move(r));
  }
  std::map<std::string, std::vector<const SampleRecord*>> by_subset;
  std::vector<const SampleRecord*> all;
  for (const auto& r : rep.samples) {
    by_subset[r.subset].push_back(&r);
    all.push_back(&r);
  }
  for (const auto& [name, rows] : by_subset) rep.subsets[name] = aggregate(rows);
  rep.total = aggregate(all);
  return rep;
}

std::string report_to_json(const EvalReport& r, int indent) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto agg = [](const Aggregate& a) { return json{{"included", a.included}, {"means", a.means}, {"counts", a.counts}}; };
  json samples = json::array();
  for (const auto& s : r.samples) {
    json row = {{"id", s.id},          {"subset", s.subset},  {"status", s.status},
                {"ocr_acc", opt(s.ocr_acc)}, {"ocr_ned", opt(s.ocr_ned)}, {"clip", opt(s.clip)},
                {"vqa", opt(s.vqa)},   {"style", opt(s.style)}, {"faith", opt(s.faith)}};
    if (!s.error.empty()) row["error"] = s.error;
    samples.push_back(std::move(row));
  }
  json subsets = json::object();
  for (const auto& [name, a] : r.subsets) subsets[name] = agg(a);
  return json{{"schema", 1},     {"config", r.config}, {"samples", samples}, {"subsets", subsets},
              {"total", agg(r.total)}, {"skipped", r.skipped}, {"errors", r.errors}}
      .dump(indent);
}

}  // namespace glyphforge::bench
