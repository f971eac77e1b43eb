// Map documents (JSON), SVG rendering and run statistics.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "metrolabel/hardness.hpp"
#include "metrolabel/pipeline.hpp"

namespace metrolabel {

// Error located at a JSON pointer into the input document.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

class MapGeometryError : public GeometryError {
 public:
  MapGeometryError(std::string pointer, const std::string& what)
      : GeometryError(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

inline constexpr int kMapVersion = 1;

MetroMap parse_map(std::string_view json_text);
MetroMap load_map(const std::filesystem::path& p);
// Numbers with six decimals; stable key order.
std::string serialize_map(const MetroMap& map);

CostWeights parse_weights(std::string_view json_text);

// {"num_vars": n, "clauses": [[1, 2, 3], [-1, -2, -2]], "order": [...],
//  "levels": [...]}; order and levels are optional, levels follow clauses.
MonotoneFormula parse_formula(std::string_view json_text);

struct SvgOptions {
  double margin = 2.0;
  double units_to_px = 10.0;
  double text_height = 1.0;  // map units; typically label height times scale
  bool draw_polygons = true;
};

std::string render_svg(const MetroMap& map, const Labeling* labeling, const SvgOptions& opts);

struct StatsOptions {
  bool include_timings = false;  // timings vary run to run
};
std::string stats_json(const RunStats& stats, const StatsOptions& opts = {});

// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& p, std::string_view contents);

// printf-style fixed six-decimal formatting used by all writers.
std::string fixed6(double v);

}  // namespace metrolabel
