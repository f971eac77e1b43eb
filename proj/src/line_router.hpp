// Routes one simple line through prescribed stops on a square grid: a
// simply connected cell region is grown stop by stop and its boundary,
// cut open once, becomes the line.
#pragma once

#include <string>
#include <vector>

#include "metrolabel/geometry.hpp"
#include "metrolabel/styles.hpp"

namespace metrolabel::detail {

struct RouteStop {
  std::string id;
  Point position;          // grid vertex
  SegmentKind segment;     // Horizontal or Vertical
};

// Region the line has to cross.
struct RouteTarget {
  std::string stop;
  SimplePolygon shape;
};

struct RoutedLine {
  std::vector<Point> ring;  // closed boundary, counterclockwise, no repeated first vertex
  std::vector<Point> open;  // ring minus one edge away from every stop
};

// Throws EmbeddingConflict when some stop or target cannot be reached.
// Obstacles are kept strictly off the line.
RoutedLine route_line(const std::vector<RouteStop>& stops, const std::vector<BBox>& obstacles,
                      const std::vector<RouteTarget>& targets, double cell = 5.0);

}  // namespace metrolabel::detail
