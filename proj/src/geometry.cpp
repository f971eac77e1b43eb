#include "metrolabel/geometry.hpp"

#include <algorithm>
#include <array>

namespace metrolabel {

Point normalized(Point a) {
  const double n = norm(a);
  if (n < 1e-300) return {0.0, 0.0};
  return {a.x / n, a.y / n};
}

double distance_point_segment(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

BBox BBox::of(std::span<const Point> pts) {
  BBox b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const Point& p : pts) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

bool strictly_crossing(Point a, Point b, Point c, Point d) {
  const int d1 = sign_of(cross(b - a, c - a));
  const int d2 = sign_of(cross(b - a, d - a));
  const int d3 = sign_of(cross(d - c, a - c));
  const int d4 = sign_of(cross(d - c, b - c));
  return d1 * d2 < 0 && d3 * d4 < 0;
}

double signed_area(std::span<const Point> v) {
  double a = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) a += cross(v[i], v[(i + 1) % n]);
  return 0.5 * a;
}

}  // namespace

bool segments_intersect(Point a, Point b, Point c, Point d, double eps) {
  if (std::max(a.x, b.x) + eps < std::min(c.x, d.x) || std::max(c.x, d.x) + eps < std::min(a.x, b.x) ||
      std::max(a.y, b.y) + eps < std::min(c.y, d.y) || std::max(c.y, d.y) + eps < std::min(a.y, b.y))
    return false;
  if (strictly_crossing(a, b, c, d)) return true;
  return distance_point_segment(a, c, d) <= eps || distance_point_segment(b, c, d) <= eps ||
         distance_point_segment(c, a, b) <= eps || distance_point_segment(d, a, b) <= eps;
}

// ____ Polyline

Polyline::Polyline(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw GeometryError("polyline needs at least two vertices");
  for (const Point& p : vertices_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("non-finite coordinate");
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i)
    if (norm(vertices_[i + 1] - vertices_[i]) <= kEps) throw GeometryError("repeated consecutive vertex");
  bbox_ = BBox::of(vertices_);

  const std::size_t m = segment_count();
  std::vector<BBox> boxes(m);
  for (std::size_t i = 0; i < m; ++i) boxes[i] = BBox::of(std::span(vertices_).subspan(i, 2));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (!boxes[i].overlaps(boxes[j])) continue;
      const Point a = vertices_[i], b = vertices_[i + 1], c = vertices_[j], d = vertices_[j + 1];
      if (j == i + 1) {
        // Adjacent segments may only share their joint vertex.
        const Point u = b - a, v = d - c;
        if (std::abs(cross(u, v)) <= kEps * norm(u) * norm(v) && dot(u, v) < 0)
          throw GeometryError("polyline folds back on itself");
        continue;
      }
      if (segments_intersect(a, b, c, d)) throw GeometryError("polyline self-intersects");
    }
  }
}

double Polyline::length() const {
  double s = 0.0;
  for (std::size_t i = 0; i < segment_count(); ++i) s += norm(vertices_[i + 1] - vertices_[i]);
  return s;
}

Polyline::Location Polyline::locate(Point q, double tol) const {
  double arc = 0.0;
  for (std::size_t i = 0; i < segment_count(); ++i) {
    const Point a = vertices_[i], b = vertices_[i + 1];
    const double len = norm(b - a);
    if (distance_point_segment(q, a, b) <= tol) {
      const double t = std::clamp(dot(q - a, b - a) / (len * len), 0.0, 1.0);
      return {i, t, arc + t * len};
    }
    arc += len;
  }
  throw PointNotOnLine("point is not on the polyline");
}

Point Polyline::tangent_at(Point q, double tol) const {
  const Location loc = locate(q, tol);
  const std::size_t i = loc.segment;
  const Point dir = normalized(vertices_[i + 1] - vertices_[i]);
  const bool at_end_vertex = norm(q - vertices_[i + 1]) <= tol && i + 1 < segment_count();
  const bool at_start_vertex = norm(q - vertices_[i]) <= tol && i > 0;
  if (at_end_vertex || at_start_vertex) {
    const std::size_t v = at_end_vertex ? i + 1 : i;
    const Point in = normalized(vertices_[v] - vertices_[v - 1]);
    const Point out = normalized(vertices_[v + 1] - vertices_[v]);
    const Point bis = in + out;
    if (norm(bis) > kEps) return normalized(bis);
    return out;
  }
  return dir;
}

Polyline Polyline::reversed() const {
  std::vector<Point> v(vertices_.rbegin(), vertices_.rend());
  return Polyline(std::move(v));
}

// ____ SimplePolygon

SimplePolygon::SimplePolygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw GeometryError("polygon needs at least three vertices");
  for (const Point& p : vertices_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("non-finite coordinate");
  finish();
  if (area() <= kEps) throw GeometryError("polygon has zero area");
  if (!is_simple()) throw GeometryError("polygon is not simple");
}

SimplePolygon SimplePolygon::trusted(std::vector<Point> vertices) {
  SimplePolygon p;
  p.vertices_ = std::move(vertices);
  p.finish();
  return p;
}

void SimplePolygon::finish() {
  if (signed_area(vertices_) < 0) std::reverse(vertices_.begin(), vertices_.end());
  bbox_ = BBox::of(vertices_);
}

double SimplePolygon::area() const { return std::abs(signed_area(vertices_)); }

Point SimplePolygon::centroid() const {
  const auto& v = vertices_;
  double a = 0.0, cx = 0.0, cy = 0.0;
  const Point o = v[0];
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point p = v[i] - o, q = v[(i + 1) % n] - o;
    const double c = cross(p, q);
    a += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  if (std::abs(a) < 1e-300) return o;
  return {o.x + cx / (3.0 * a), o.y + cy / (3.0 * a)};
}

bool SimplePolygon::contains(Point p, double eps) const {
  if (p.x < bbox_.min_x - eps || p.x > bbox_.max_x + eps || p.y < bbox_.min_y - eps || p.y > bbox_.max_y + eps)
    return false;
  const auto& v = vertices_;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    if (distance_point_segment(p, v[i], v[(i + 1) % n]) <= eps) return true;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool SimplePolygon::is_simple() const {
  const auto& v = vertices_;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i], b = v[(i + 1) % n];
    if (norm(b - a) <= kEps) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = v[j], d = v[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        const Point u = b - a, w = d - c;
        if (std::abs(cross(u, w)) <= kEps * norm(u) * norm(w) && dot(u, w) < 0) return false;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

// ____ predicates

bool polygon_intersects_segment(const SimplePolygon& p, Point a, Point b) {
  const std::array<Point, 2> ends{a, b};
  if (!p.bbox().overlaps(BBox::of(ends))) return false;
  const auto v = p.vertices();
  for (std::size_t i = 0, n = v.size(); i < n; ++i)
    if (segments_intersect(a, b, v[i], v[(i + 1) % n])) return true;
  return p.contains(a);
}

bool polygons_intersect(const SimplePolygon& a, const SimplePolygon& b) {
  if (!a.bbox().overlaps(b.bbox())) return false;
  const auto va = a.vertices();
  const auto vb = b.vertices();
  for (std::size_t i = 0, n = va.size(); i < n; ++i) {
    const Point p = va[i], q = va[(i + 1) % n];
    const std::array<Point, 2> e{p, q};
    if (!BBox::of(e).overlaps(b.bbox())) continue;
    for (std::size_t j = 0, m = vb.size(); j < m; ++j)
      if (segments_intersect(p, q, vb[j], vb[(j + 1) % m])) return true;
  }
  return b.contains(va[0]) || a.contains(vb[0]);
}

bool polygon_intersects_polyline(const SimplePolygon& p, const Polyline& l) {
  if (!p.bbox().overlaps(l.bbox())) return false;
  for (std::size_t i = 0; i < l.segment_count(); ++i)
    if (polygon_intersects_segment(p, l.segment_start(i), l.segment_end(i))) return true;
  return false;
}

// ____ Bezier

Point bezier_point(const FatBezier& f, double t) {
  const double u = 1.0 - t;
  return (u * u * u) * f.p1 + (3 * u * u * t) * f.p2 + (3 * u * t * t) * f.p3 + (t * t * t) * f.p4;
}

Point bezier_derivative(const FatBezier& f, double t) {
  const double u = 1.0 - t;
  return (3 * u * u) * (f.p2 - f.p1) + (6 * u * t) * (f.p3 - f.p2) + (3 * t * t) * (f.p4 - f.p3);
}

namespace {

constexpr int kArcSteps = 512;

struct ArcTable {
  std::array<double, kArcSteps + 1> s{};
  std::array<Point, kArcSteps + 1> p{};
};

ArcTable arc_table(const FatBezier& f) {
  ArcTable tab;
  tab.p[0] = f.p1;
  for (int i = 1; i <= kArcSteps; ++i) {
    tab.p[i] = bezier_point(f, static_cast<double>(i) / kArcSteps);
    tab.s[i] = tab.s[i - 1] + norm(tab.p[i] - tab.p[i - 1]);
  }
  return tab;
}

Point end_direction(const FatBezier& f) {
  for (const Point d : {f.p4 - f.p3, f.p4 - f.p2, f.p4 - f.p1})
    if (norm(d) > kEps) return normalized(d);
  return {1.0, 0.0};
}

Point start_direction(const FatBezier& f) {
  for (const Point d : {f.p2 - f.p1, f.p3 - f.p1, f.p4 - f.p1})
    if (norm(d) > kEps) return normalized(d);
  return {1.0, 0.0};
}

// Point and unit tangent at arc length s, extending past p4 along the end
// tangent.
std::pair<Point, Point> at_arc_length(const FatBezier& f, const ArcTable& tab, double s) {
  const double total = tab.s[kArcSteps];
  if (s >= total) {
    const Point d = end_direction(f);
    return {f.p4 + (s - total) * d, d};
  }
  if (s <= 0.0) return {f.p1, start_direction(f)};
  const auto it = std::upper_bound(tab.s.begin(), tab.s.end(), s);
  const auto i = static_cast<std::size_t>(it - tab.s.begin());  // tab.s[i-1] <= s < tab.s[i]
  const double seg = tab.s[i] - tab.s[i - 1];
  const double frac = seg > 0 ? (s - tab.s[i - 1]) / seg : 0.0;
  const double t = (static_cast<double>(i - 1) + frac) / kArcSteps;
  Point d = bezier_derivative(f, t);
  d = norm(d) > kEps ? normalized(d) : normalized(tab.p[i] - tab.p[i - 1]);
  return {tab.p[i - 1] + frac * (tab.p[i] - tab.p[i - 1]), d};
}

void check_curve(const FatBezier& f, int samples_per_side) {
  if (samples_per_side < 2) throw GeometryError("samples_per_side must be at least 2");
  const double spread = norm(f.p2 - f.p1) + norm(f.p3 - f.p1) + norm(f.p4 - f.p1);
  if (spread <= kEps) throw DegenerateCurve("all control points coincide");
  if (!(f.thickness > 0.0) || !(f.trim_length > 0.0)) throw GeometryError("thickness and trim must be positive");
}

}  // namespace

double bezier_length(const FatBezier& f) { return arc_table(f).s[kArcSteps]; }

std::vector<Point> bezier_centerline(const FatBezier& f, int samples_per_side) {
  check_curve(f, samples_per_side);
  const ArcTable tab = arc_table(f);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(samples_per_side));
  for (int i = 0; i < samples_per_side; ++i) {
    const double s = f.start_length + f.trim_length * i / (samples_per_side - 1);
    out.push_back(at_arc_length(f, tab, s).first);
  }
  return out;
}

SimplePolygon flatten_fat_bezier(const FatBezier& f, int samples_per_side) {
  check_curve(f, samples_per_side);
  const ArcTable tab = arc_table(f);
  const auto n = static_cast<std::size_t>(samples_per_side);
  std::vector<Point> left(n), right(n);
  const double half = 0.5 * f.thickness;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = f.start_length + f.trim_length * static_cast<double>(i) / static_cast<double>(n - 1);
    const auto [c, d] = at_arc_length(f, tab, s);
    const Point nrm = perp(d);
    left[i] = c + half * nrm;
    right[i] = c - half * nrm;
  }
  std::vector<Point> v;
  v.reserve(2 * n);
  v.insert(v.end(), left.begin(), left.end());
  v.insert(v.end(), right.rbegin(), right.rend());
  return SimplePolygon::trusted(std::move(v));
}

// ____ normals and sides

Point normal_at(const Polyline& line, Point q) {
  const Point t = line.tangent_at(q);
  Point n = perp(t);
  if (n.y < -kEps || (std::abs(n.y) <= kEps && n.x < 0)) n = -1.0 * n;
  if (std::abs(n.y) <= kEps) n.y = 0.0;
  if (std::abs(n.x) <= kEps) n.x = 0.0;
  return n;
}

Side side_of(const Polyline& line, const SimplePolygon& c, Point anchor) {
  const Point t = line.tangent_at(anchor);
  const Point r = c.centroid() - anchor;
  const double cr = cross(t, r);
  if (std::abs(cr) <= kEps * std::max(1.0, norm(r))) throw AmbiguousSide("label centroid lies on the line");
  return cr > 0 ? Side::Left : Side::Right;
}

}  // namespace metrolabel
