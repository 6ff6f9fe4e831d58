// Python bindings. Structured results cross the boundary as JSON text or
// numpy arrays; the iconforge package wraps them into Python objects.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "iconforge/bench.hpp"
#include "iconforge/errors.hpp"
#include "iconforge/pipeline.hpp"
#include "iconforge/solver.hpp"

namespace py = pybind11;
using namespace iconforge;

namespace {

using Image = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Image to_array(const RgbImage& img) {
  Image out({img.height, img.width, 3});
  std::memcpy(out.mutable_data(), img.pixels.data(), img.pixels.size());
  return out;
}

RgbImage from_array(const Image& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw ValidationError("image must be an (H, W, 3) uint8 array");
  RgbImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::memcpy(img.pixels.data(), a.data(), img.pixels.size());
  return img;
}

std::vector<Vec2> to_points(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw ValidationError("points must be an (N, 2) array");
  std::vector<Vec2> out(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {a.at(k, 0), a.at(k, 1)};
  return out;
}

PipelineConfig make_config(const std::string& text) {
  PipelineConfig cfg;
  apply_config(text, cfg);
  return cfg;
}

MotionMap motions_from(const Scene& scene, const std::string& json) {
  return json.empty() ? MotionMap{} : parse_motions(json, scene);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "iconforge core";

  auto base = py::register_exception<Error>(m, "IconforgeError");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<EvalError>(m, "EvalError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());

  py::class_<Scene>(m, "Scene")
      .def_static("load", [](const std::string& path) { return load_scene(path); }, py::arg("path"))
      .def_static("parse", [](const std::string& text) { return parse_scene(text); }, py::arg("text"))
      .def("to_json", [](const Scene& s) { return dump_scene(s); })
      .def_readonly("width", &Scene::width)
      .def_readonly("height", &Scene::height)
      .def("__len__", [](const Scene& s) { return s.segments.size(); })
      .def("labels", [](const Scene& s) {
        std::vector<std::string> out;
        for (const Segment& seg : s.segments) out.push_back(seg.label.text());
        return out;
      })
      .def("samples", [](const Scene& s, int id) {
        const auto& pts = s.segment(id).samples;
        py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
        auto w = out.mutable_unchecked<2>();
        for (std::size_t k = 0; k < pts.size(); ++k) {
          w(k, 0) = pts[k].x;
          w(k, 1) = pts[k].y;
        }
        return out;
      }, py::arg("id"))
      .def("apply_motions", [](const Scene& s, const std::string& motions_json) {
        return apply_motions(s, motions_from(s, motions_json));
      }, py::arg("motions_json"));

  py::class_<dsl::ConstraintProgram>(m, "Program")
      .def("serialize", [](const dsl::ConstraintProgram& p) { return dsl::serialize(p); })
      .def("__str__", [](const dsl::ConstraintProgram& p) { return dsl::serialize(p); })
      .def("__eq__", [](const dsl::ConstraintProgram& a, const dsl::ConstraintProgram& b) { return a == b; })
      .def_property_readonly("motions", [](const dsl::ConstraintProgram& p) {
        std::vector<std::pair<int, std::string>> out;
        for (const dsl::MotionSpec& s : p.motions) out.emplace_back(s.target, std::string(dsl::motion_name(s.kind)));
        return out;
      })
      .def_property_readonly("constraint_count", [](const dsl::ConstraintProgram& p) { return p.constraints.size(); });

  m.def("parse_program", [](const std::string& text, const Scene* scene) { return dsl::parse(text, scene); },
        py::arg("text"), py::arg("scene") = nullptr);
  m.def("validate", [](const dsl::ConstraintProgram& p, const Scene& s) {
    const auto r = dsl::validate(p, s);
    return std::make_pair(r.ok(), r.text());
  }, py::arg("program"), py::arg("scene"));

  m.def("relations_json", [](const Scene& s, const std::string& config) {
    return dump_relations(build_graph(s, make_config(config).relations), s);
  }, py::arg("scene"), py::arg("config") = "");

  m.def("edit", [](const Scene& s, const dsl::ConstraintProgram& p, const std::string& config) {
    EditResult r;
    {
      py::gil_scoped_release release;
      r = run_edit(s, p, make_config(config));
    }
    py::dict out;
    out["motions_json"] = dump_motions(s, r.search.solve.motions);
    out["score"] = r.search.solve.score;
    out["solves"] = r.search.solves;
    out["states"] = describe(r.search.states, r.graph);
    out["order"] = r.order.order;
    out["image"] = to_array(r.image);
    return out;
  }, py::arg("scene"), py::arg("program"), py::arg("config") = "");

  m.def("render", [](const Scene& s, const std::string& motions_json, const std::string& order_mode, int width,
                     int height) {
    const MotionMap motions = motions_from(s, motions_json);
    const DepthOrder order = resolve_order(s, motions, parse_order_mode(order_mode));
    return to_array(rasterize(s, motions, order.order, width > 0 ? width : s.width, height > 0 ? height : s.height));
  }, py::arg("scene"), py::arg("motions_json") = "", py::arg("order_mode") = "auto", py::arg("width") = 0,
        py::arg("height") = 0);

  m.def("svg", [](const Scene& s, const std::string& motions_json, const std::string& order_mode) {
    const MotionMap motions = motions_from(s, motions_json);
    return export_svg(s, motions, resolve_order(s, motions, parse_order_mode(order_mode)).order);
  }, py::arg("scene"), py::arg("motions_json") = "", py::arg("order_mode") = "auto");

  m.def("chamfer", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pred,
                      const py::array_t<double, py::array::c_style | py::array::forcecast>& gt) {
    return chamfer(to_points(pred), to_points(gt));
  }, py::arg("pred"), py::arg("gt"));
  m.def("image_mse", [](const Image& a, const Image& b) { return image_mse(from_array(a), from_array(b)); },
        py::arg("a"), py::arg("b"));
  m.def("scene_chamfer", [](const Scene& pred, const Scene& gt, const Scene* source) {
    return scene_chamfer(pred, gt, source).mean;
  }, py::arg("pred"), py::arg("gt"), py::arg("source") = nullptr);

  m.def("run_manifest", [](const std::string& path, const std::string& config) {
    const PipelineConfig cfg = make_config(config);
    BenchReport r;
    {
      py::gil_scoped_release release;
      r = run_manifest(path, cfg);
    }
    return report_json(r);
  }, py::arg("path"), py::arg("config") = "");

  m.def("dump_config", [](const std::string& config) { return dump_config(make_config(config)); },
        py::arg("config") = "");
}
