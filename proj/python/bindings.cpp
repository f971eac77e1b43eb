#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "metrolabel/io.hpp"
#include "metrolabel/oracle.hpp"

namespace py = pybind11;
using namespace metrolabel;

namespace {

py::dict cost_dict(const CostBreakdown& c) {
  py::dict d;
  d["w1"] = c.w1;
  d["w2"] = c.w2;
  d["w3"] = c.w3;
  d["total"] = c.total();
  return d;
}

py::dict label(const std::string& map_json, const std::string& algo, double scale_min, double scale_max,
               int scale_steps, const std::string& weights_json, std::uint64_t oracle_budget) {
  const MetroMap map = parse_map(map_json);
  PipelineConfig cfg;
  if (!weights_json.empty()) cfg.weights = parse_weights(weights_json);
  if (!(scale_min > 0) || scale_min > scale_max || scale_steps < 1)
    throw std::invalid_argument("need 0 < scale_min <= scale_max and scale_steps >= 1");
  cfg.scale = {scale_min, scale_max, scale_steps};

  RunResult r;
  {
    py::gil_scoped_release unlocked;
    if (algo == "dyn")
      r = dyn_alg(map, cfg);
    else if (algo == "greedy")
      r = greedy_alg(map, cfg);
    else if (algo == "oracle")
      r = oracle_alg(map, cfg, oracle_budget);
    else
      throw std::invalid_argument("algo must be dyn, greedy or oracle");
  }

  py::dict out;
  out["success"] = r.stats.success;
  out["failure"] = r.stats.failure;
  out["scale"] = r.stats.scale;
  out["cost"] = cost_dict(r.stats.cost);
  out["switchovers"] = r.stats.switchovers;
  out["stats_json"] = stats_json(r.stats);
  if (r.labeling) {
    SvgOptions opts;
    opts.text_height = map.label.height * r.stats.scale;
    out["svg"] = render_svg(map, &*r.labeling, opts);
    py::dict chosen;
    for (const auto& line : r.labeling->lines)
      for (const auto& c : line.labels) chosen[py::str(c.stop_id)] = to_string(c.side);
    out["sides"] = chosen;
  } else {
    out["svg"] = py::none();
    out["sides"] = py::dict();
  }
  return out;
}

py::tuple validate_map(const std::string& map_json) {
  const MetroMap map = parse_map(map_json);
  std::size_t stops = 0;
  for (const auto& l : map.lines) stops += l.stops.size();
  return py::make_tuple(map.lines.size(), stops);
}

std::string hardgen(const std::string& formula_json, int spacing) {
  MonotoneFormula f = parse_formula(formula_json);
  if (f.order.empty()) {
    auto embedded = with_embedding(f);
    if (!embedded) throw std::invalid_argument("formula has no crossing-free layout");
    f = std::move(*embedded);
  }
  return serialize_map(reduce(f, {spacing}).map);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Metro map labeling";
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<MapGeometryError>(m, "MapGeometryError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  m.def("label", &label, py::arg("map_json"), py::arg("algo") = "dyn", py::arg("scale_min") = 0.2,
        py::arg("scale_max") = 1.0, py::arg("scale_steps") = 20, py::arg("weights_json") = "",
        py::arg("oracle_budget") = 1'000'000);
  m.def("validate", &validate_map, py::arg("map_json"), "Returns (lines, stops).");
  m.def("hardgen", &hardgen, py::arg("formula_json"), py::arg("spacing") = kDefaultSpacing,
        "Map document for a planar monotone 3-SAT formula.");
  m.def("satisfiable", [](const std::string& formula_json) { return satisfiable(parse_formula(formula_json)); },
        py::arg("formula_json"));
}
