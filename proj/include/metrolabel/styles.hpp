// Metro map model and candidate generation for the curved and the
// octilinear labeling style.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metrolabel/geometry.hpp"

namespace metrolabel {

enum class StyleKind { Octilinear, Curved };
enum class Shape { Horizontal, Diagonal, Curved };
// Orientation class of the line segment carrying a stop.
enum class SegmentKind { Horizontal, Vertical, Diagonal, Free };

const char* to_string(StyleKind s);
const char* to_string(Shape s);

class StyleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotOctilinear : public StyleError {
 public:
  using StyleError::StyleError;
};
class ZeroExtent : public StyleError {
 public:
  using StyleError::StyleError;
};

struct Stop {
  std::string id;
  std::string name;
  Point position;
  std::string line_id;
  int index = 0;
};

struct MetroLine {
  std::string id;
  Polyline path;
  std::vector<Stop> stops;
};

struct LabelMetrics {
  double height = 1.0;
  double char_width = 0.6;
  double stop_offset = 0.6;  // radius of the clearance circle around a stop
};

struct MetroMap {
  StyleKind style = StyleKind::Octilinear;
  LabelMetrics label;
  std::vector<MetroLine> lines;

  std::size_t stop_count() const;
};

struct StyleParams {
  double label_height = 1.0;
  double char_width = 0.6;
  double stop_offset = 0.6;
  double longest_name_length = 0.0;  // unscaled
  double orientation_threshold_deg = 60.0;
  double scale = 1.0;
  int samples_per_side = 24;
};

StyleParams params_for(const MetroMap& map, double scale = 1.0);

struct Candidate {
  int id = 0;
  std::string stop_id;
  int line = 0;  // index into MetroMap::lines
  int stop = 0;  // index into MetroLine::stops
  SimplePolygon polygon;
  Side side = Side::Left;
  double alpha = 0.0;
  double delta = 0.0;
  int xdir = 1;
  Shape shape = Shape::Horizontal;
  SegmentKind segment = SegmentKind::Free;
  Point start_point;
  Point end_point;
  std::vector<Point> centerline;  // text baseline path, start to end
};

using StopCandidates = std::vector<Candidate>;
using LineCandidates = std::vector<StopCandidates>;  // indexed by stop
using MapCandidates = std::vector<LineCandidates>;   // indexed by line

struct Classification {
  double alpha;
  double delta;
  int xdir;
};

Classification classify(Point start, Point end);
double steepness_from_angle(double alpha);

double name_length(const Stop& s, const StyleParams& p);

// Candidates for one stop. `id` is the first id to assign and is advanced.
std::vector<Candidate> generate_curved(const MetroLine& line, const Stop& s, const StyleParams& p, int& id);
std::vector<Candidate> generate_octilinear(const MetroMap& map, int line_index, const Stop& s,
                                           const StyleParams& p, int& id);

// Every candidate of every stop; candidates whose side cannot be decided are
// dropped.
MapCandidates generate_candidates(const MetroMap& map, const StyleParams& p);

// Orientation class of segment direction d (octilinear within 0.5 degrees).
std::optional<SegmentKind> octilinear_kind(Point d);

}  // namespace metrolabel
