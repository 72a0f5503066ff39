#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "glyphforge/bench.hpp"
#include "glyphforge/errors.hpp"
#include "glyphforge/glyph_renderer.hpp"
#include "glyphforge/metrics.hpp"
#include "glyphforge/segmentation.hpp"
#include "glyphforge/typography_plan.hpp"
#include "glyphforge/vlm.hpp"

namespace py = pybind11;
using namespace glyphforge;

namespace {

// HxW (gray) or HxWxC uint8 copy.
py::array_t<std::uint8_t> to_array(const Image& img) {
  std::vector<py::ssize_t> shape{img.height, img.width};
  if (img.channels > 1) shape.push_back(img.channels);
  py::array_t<std::uint8_t> out(shape);
  std::copy(img.data.begin(), img.data.end(), out.mutable_data());
  return out;
}

Image from_array(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw ShapeError("expected an HxW or HxWxC uint8 array", "image");
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), c);
  std::copy(a.data(), a.data() + a.size(), img.data.begin());
  return img;
}

}  // namespace

PYBIND11_MODULE(_glyphforge, m) {
  m.doc() = "Glyph-template rendering, injection and evaluation bindings";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);

  // plans
  m.def("parse_plan", [](const std::string& s) { return plan::serialize_plan(plan::parse_plan(s)); },
        "Validate a typography plan JSON string; returns its canonical serialization.");
  m.def("bbox_iou", [](std::array<double, 4> a, std::array<double, 4> b) {
    return plan::bbox_iou({a[0], a[1], a[2], a[3]}, {b[0], b[1], b[2], b[3]});
  });
  m.def("overlay_grid", [](const py::array_t<std::uint8_t>& img, int n) {
    return to_array(plan::overlay_grid(from_array(img), n));
  });

  // rendering
  m.def(
      "render_plan",
      [](const std::string& plan_json, int width, int height) {
        const auto t = render::render_plan(plan::parse_plan(plan_json), width, height, render::FontRegistry::builtin());
        return py::make_tuple(to_array(t.image), to_array(t.mask));
      },
      py::arg("plan_json"), py::arg("width"), py::arg("height"), "Returns (template RGB, mask gray).");
  m.def("unicode_to_latex", [](const std::string& s) { return render::unicode_to_latex(s); });
  m.def("detect_math", [](const std::string& s) { return render::detect_math(s); });

  // segmentation
  m.def("otsu_threshold", [](const py::array_t<std::uint8_t>& img) { return seg::otsu_threshold(from_array(img)); });

  // metrics
  m.def("normalize_text", [](const std::string& s) { return metrics::normalize_text(s); });
  m.def("levenshtein", [](const std::string& a, const std::string& b) {
    return metrics::levenshtein(std::string_view(a), std::string_view(b));
  });
  m.def("ocr_acc", [](const std::string& t, const std::string& r) { return metrics::ocr_acc({t, r}); });
  m.def("ocr_ned", [](const std::string& t, const std::string& r, double eps) { return metrics::ocr_ned({t, r}, eps); },
        py::arg("target"), py::arg("recognized"), py::arg("eps") = metrics::kNedEpsilon);
  m.def("clip_rescale", &metrics::clip_rescale);
  m.def("vlm_score_normalize", &metrics::vlm_score_normalize);
  m.def("extract_quoted_text", [](const std::string& p) { return vlm::extract_quoted_text(p); });

  // bench
  m.def("ablation_improvement", &bench::ablation_improvement);
  m.def(
      "compute_stats",
      [](const std::optional<std::filesystem::path>& manifest) {
        const auto samples = manifest ? bench::load_manifest(*manifest) : bench::builtin_fixture();
        return bench::stats_to_json(bench::compute_stats(samples));
      },
      py::arg("manifest") = py::none(), "Statistics table as JSON; defaults to the built-in fixture.");
  m.def(
      "run_mock_pipeline",
      [](const std::string& prompt, const std::filesystem::path& out_dir, std::uint64_t seed, bool refine) {
        bench::BenchSample s;
        s.id = "adhoc";
        s.subset = "adhoc";
        s.language = "en";
        s.prompt = prompt;
        s.texts = {vlm::extract_quoted_text(prompt)};
        s.difficulty = "easy";
        bench::PipelineConfig cfg;
        cfg.seed = seed;
        cfg.refine = refine;
        const auto r = [&] {
          py::gil_scoped_release release;
          return bench::run_pipeline(s, cfg, bench::Backends::mock(), out_dir);
        }();
        if (!r.ok) throw std::runtime_error(r.failed_stage + ": " + r.error);
        return to_array(r.final_image);
      },
      py::arg("prompt"), py::arg("out_dir"), py::arg("seed") = 7, py::arg("refine") = true,
      "Full pipeline with offline mock backends; returns the final image.");
}
