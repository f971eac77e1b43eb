// Planar primitives for label placement: points, polylines, simple
// polygons, fat Bezier flattening and closed intersection predicates.
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace metrolabel {

inline constexpr double kEps = 1e-9;
inline constexpr double kSnapTolerance = 1e-6;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline Point perp(Point a) { return {-a.y, a.x}; }
Point normalized(Point a);
double distance_point_segment(Point p, Point a, Point b);

enum class Side { Left, Right };
inline Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
const char* to_string(Side s);

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DegenerateCurve : public GeometryError {
 public:
  using GeometryError::GeometryError;
};
class PointNotOnLine : public GeometryError {
 public:
  using GeometryError::GeometryError;
};
class AmbiguousSide : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

struct BBox {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;

  static BBox of(std::span<const Point> pts);
  bool overlaps(const BBox& o, double eps = kEps) const {
    return min_x <= o.max_x + eps && o.min_x <= max_x + eps &&
           min_y <= o.max_y + eps && o.min_y <= max_y + eps;
  }
  double diameter() const { return std::hypot(max_x - min_x, max_y - min_y); }
  BBox merged(const BBox& o) const {
    return {std::min(min_x, o.min_x), std::min(min_y, o.min_y), std::max(max_x, o.max_x), std::max(max_y, o.max_y)};
  }
};

// Closed segment intersection with tolerance; collinear overlap and endpoint
// contact both count.
bool segments_intersect(Point a, Point b, Point c, Point d, double eps = kEps);

class Polyline {
 public:
  // Throws GeometryError when fewer than two vertices, repeated consecutive
  // vertices or a self-intersection is present.
  explicit Polyline(std::vector<Point> vertices);

  std::span<const Point> vertices() const { return vertices_; }
  std::size_t segment_count() const { return vertices_.size() - 1; }
  Point segment_start(std::size_t i) const { return vertices_[i]; }
  Point segment_end(std::size_t i) const { return vertices_[i + 1]; }
  const BBox& bbox() const { return bbox_; }
  double length() const;

  struct Location {
    std::size_t segment;
    double t;          // parameter on the segment in [0,1]
    double arc_length; // from the first vertex
  };
  // First location within `tol` of q, scanning from the start.
  Location locate(Point q, double tol = kSnapTolerance) const;
  // Unit tangent at q; at an interior vertex the bisector of the incident
  // unit directions.
  Point tangent_at(Point q, double tol = kSnapTolerance) const;
  Polyline reversed() const;

 private:
  std::vector<Point> vertices_;
  BBox bbox_;
};

class SimplePolygon {
 public:
  SimplePolygon() = default;  // empty placeholder, not a valid polygon
  // Validates simplicity and nonzero area; reorders to counterclockwise.
  explicit SimplePolygon(std::vector<Point> vertices);
  // Skips the quadratic simplicity check for polygons built by trusted
  // generators; orientation is still normalized.
  static SimplePolygon trusted(std::vector<Point> vertices);

  std::span<const Point> vertices() const { return vertices_; }
  const BBox& bbox() const { return bbox_; }
  double area() const;  // positive
  Point centroid() const;
  bool contains(Point p, double eps = kEps) const;  // closed region
  bool is_simple() const;

 private:
  void finish();
  std::vector<Point> vertices_;
  BBox bbox_;
};

bool polygons_intersect(const SimplePolygon& a, const SimplePolygon& b);
bool polygon_intersects_polyline(const SimplePolygon& p, const Polyline& l);
bool polygon_intersects_segment(const SimplePolygon& p, Point a, Point b);

struct FatBezier {
  Point p1, p2, p3, p4;
  double thickness = 1.0;
  double trim_length = 1.0;
  double start_length = 0.0;  // arc length skipped before the kept window
};

Point bezier_point(const FatBezier& f, double t);
Point bezier_derivative(const FatBezier& f, double t);
double bezier_length(const FatBezier& f);

// Polygon with 2*samples_per_side vertices enclosing the centerline window
// [start_length, start_length + trim_length]. Windows reaching past p4
// continue along the end tangent.
SimplePolygon flatten_fat_bezier(const FatBezier& f, int samples_per_side = 24);
// Sampled centerline of the same window (samples_per_side points).
std::vector<Point> bezier_centerline(const FatBezier& f, int samples_per_side = 24);

Point normal_at(const Polyline& line, Point q);
Side side_of(const Polyline& line, const SimplePolygon& c, Point anchor);

}  // namespace metrolabel
