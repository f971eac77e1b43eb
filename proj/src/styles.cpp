#include "metrolabel/styles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace metrolabel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

Point rotate(Point v, double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Point unit_at_deg(double deg) { return {std::cos(deg * kDeg), std::sin(deg * kDeg)}; }

}  // namespace

const char* to_string(StyleKind s) { return s == StyleKind::Octilinear ? "octilinear" : "curved"; }

const char* to_string(Shape s) {
  switch (s) {
    case Shape::Horizontal: return "horizontal";
    case Shape::Diagonal: return "diagonal";
    case Shape::Curved: return "curved";
  }
  return "?";
}

std::size_t MetroMap::stop_count() const {
  std::size_t n = 0;
  for (const auto& l : lines) n += l.stops.size();
  return n;
}

StyleParams params_for(const MetroMap& map, double scale) {
  StyleParams p;
  p.label_height = map.label.height;
  p.char_width = map.label.char_width;
  p.stop_offset = map.label.stop_offset;
  p.scale = scale;
  for (const auto& l : map.lines)
    for (const auto& s : l.stops)
      p.longest_name_length = std::max(p.longest_name_length, p.char_width * static_cast<double>(s.name.size()));
  return p;
}

double steepness_from_angle(double alpha) {
  if (alpha <= kPi / 2) return alpha;
  if (alpha <= kPi) return kPi - alpha;
  if (alpha <= 1.5 * kPi) return alpha - kPi;
  return 2 * kPi - alpha;
}

Classification classify(Point start, Point end) {
  const Point d = end - start;
  const double len = norm(d);
  if (len <= kEps) throw ZeroExtent("label start and end coincide");
  double alpha = std::atan2(d.y, d.x);
  if (alpha < 0) alpha += 2 * kPi;
  if (alpha >= 2 * kPi) alpha = 0.0;
  const int xdir = d.x < -1e-12 * len ? -1 : 1;
  return {alpha, steepness_from_angle(alpha), xdir};
}

double name_length(const Stop& s, const StyleParams& p) {
  if (s.name.empty()) throw StyleError("stop " + s.id + " has an empty name");
  return static_cast<double>(s.name.size()) * p.char_width * p.scale;
}

std::optional<SegmentKind> octilinear_kind(Point d) {
  double deg = std::atan2(d.y, d.x) / kDeg;
  if (deg < 0) deg += 180.0;
  if (deg >= 180.0) deg -= 180.0;
  const double tol = 0.5;
  if (deg <= tol || deg >= 180.0 - tol) return SegmentKind::Horizontal;
  if (std::abs(deg - 90.0) <= tol) return SegmentKind::Vertical;
  if (std::abs(deg - 45.0) <= tol || std::abs(deg - 135.0) <= tol) return SegmentKind::Diagonal;
  return std::nullopt;
}

// ____ curved

namespace {

double boundary_distance(const SimplePolygon& poly, Point q) {
  const auto v = poly.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) best = std::min(best, distance_point_segment(q, v[i], v[(i + 1) % v.size()]));
  return best;
}

}  // namespace

std::vector<Candidate> generate_curved(const MetroLine& line, const Stop& s, const StyleParams& p, int& id) {
  const Point n = normal_at(line.path, s.position);
  const double sgn = n.x >= 0 ? 1.0 : -1.0;
  const double lm = p.longest_name_length * p.scale;
  const double len = name_length(s, p);
  const double orientation = std::atan2(std::abs(n.y), std::abs(n.x)) / kDeg;
  std::vector<int> dirs{1};
  if (orientation > p.orientation_threshold_deg) dirs.push_back(-1);

  std::vector<Candidate> out;
  for (int d : dirs) {
    for (double c1 : {lm, lm / 2, lm / 4}) {
      const double c2 = lm;
      const Point v1 = c1 * n;
      const Point v2{sgn * d * c2, 0.0};
      FatBezier f{s.position, s.position + 0.5 * v1, s.position + v1 + 0.5 * v2, s.position + v1 + v2,
                  p.label_height * p.scale, len, p.stop_offset * p.scale};
      SimplePolygon poly = flatten_fat_bezier(f, p.samples_per_side);
      // the inner corner of a bending start cap can dip into the clearance disk
      const double r = p.stop_offset * p.scale;
      for (int pass = 0; pass < 32; ++pass) {
        const double gap = r - boundary_distance(poly, s.position);
        if (gap <= 0) break;
        f.start_length += gap + 1e-12 * r;
        poly = flatten_fat_bezier(f, p.samples_per_side);
      }
      std::vector<Point> center = bezier_centerline(f, p.samples_per_side);

      for (int mirror = 0; mirror < 2; ++mirror) {
        std::vector<Point> verts(poly.vertices().begin(), poly.vertices().end());
        std::vector<Point> cl = center;
        if (mirror == 1) {
          for (Point& v : verts) v = 2.0 * s.position - v;
          for (Point& v : cl) v = 2.0 * s.position - v;
        }
        Candidate c;
        c.polygon = SimplePolygon::trusted(std::move(verts));
        try {
          c.side = side_of(line.path, c.polygon, s.position);
        } catch (const AmbiguousSide&) {
          continue;
        }
        const Classification k = classify(cl.front(), cl.back());
        c.id = id++;
        c.stop_id = s.id;
        c.alpha = k.alpha;
        c.delta = k.delta;
        c.xdir = k.xdir;
        c.shape = Shape::Curved;
        c.segment = SegmentKind::Free;
        c.start_point = cl.front();
        c.end_point = cl.back();
        c.centerline = std::move(cl);
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

// ____ octilinear

namespace {

enum class Anchor { BL, BM, BR, ML, MR, TL, TM, TR };

// A rectangle placement: the anchor point of the rectangle (in its reading
// frame) sits on the clearance circle at `angle`; `rotation` turns the
// reading direction.
struct Placement {
  double angle;
  double rotation;
  Anchor anchor;
};

using A = Anchor;

const std::vector<Placement> kHorizontal{
    {90, 0, A::BL},   {90, 0, A::BM},   {90, 0, A::BR},   {45, 45, A::ML},   {135, -45, A::MR},
    {270, 0, A::TL},  {270, 0, A::TM},  {270, 0, A::TR},  {315, -45, A::ML}, {225, 45, A::MR}};
const std::vector<Placement> kVertical{{45, 45, A::ML},   {315, -45, A::ML}, {0, 0, A::ML},
                                       {135, -45, A::MR}, {225, 45, A::MR},  {180, 0, A::MR}};
const std::vector<Placement> kDiagonalUp{{135, 45, A::BM}, {315, 45, A::TM}, {90, 0, A::BR},  {135, 0, A::BR},
                                         {180, 0, A::BR},  {270, 0, A::TL},  {315, 0, A::TL}, {0, 0, A::TL}};
const std::vector<Placement> kDiagonalDown{{45, -45, A::BM}, {225, -45, A::TM}, {90, 0, A::BL},  {45, 0, A::BL},
                                           {0, 0, A::BL},    {270, 0, A::TR},   {225, 0, A::TR}, {180, 0, A::TR}};

// Crossings of two lines through one stop.
const std::vector<Placement> kCrossHV{{45, 0, A::BL},   {135, 0, A::BR},   {225, 0, A::TR},  {315, 0, A::TL},
                                      {45, 45, A::ML},  {135, -45, A::MR}, {225, 45, A::MR}, {315, -45, A::ML}};
const std::vector<Placement> kCrossDD{{0, 0, A::ML}, {180, 0, A::MR}, {90, 0, A::BM}, {270, 0, A::TM}};
const std::vector<Placement> kCrossHDUp{{90, 0, A::BR}, {135, 0, A::BR}, {270, 0, A::TL}, {315, 0, A::TL}};
const std::vector<Placement> kCrossHDDown{{90, 0, A::BL}, {45, 0, A::BL}, {270, 0, A::TR}, {225, 0, A::TR}};
const std::vector<Placement> kCrossVDUp{{0, 0, A::ML}, {315, 0, A::TL}, {180, 0, A::MR}, {135, 0, A::BR}};
const std::vector<Placement> kCrossVDDown{{180, 0, A::MR}, {225, 0, A::TR}, {0, 0, A::ML}, {45, 0, A::BL}};

// Finer classification used to pick a table.
enum class Dir { H, V, DiagUp, DiagDown };

std::optional<Dir> dir_of(Point d) {
  const auto k = octilinear_kind(d);
  if (!k) return std::nullopt;
  switch (*k) {
    case SegmentKind::Horizontal: return Dir::H;
    case SegmentKind::Vertical: return Dir::V;
    default: return (d.x * d.y > 0) ? Dir::DiagUp : Dir::DiagDown;
  }
}

Point anchor_local(Anchor a, double w, double h) {
  switch (a) {
    case A::BL: return {0, 0};
    case A::BM: return {w / 2, 0};
    case A::BR: return {w, 0};
    case A::ML: return {0, h / 2};
    case A::MR: return {w, h / 2};
    case A::TL: return {0, h};
    case A::TM: return {w / 2, h};
    case A::TR: return {w, h};
  }
  return {0, 0};
}

struct Rect {
  std::vector<Point> corners;
  Point start, end;
};

Rect place(const Placement& pl, Point s, double w, double h, double r) {
  const double rot = pl.rotation * kDeg;
  const Point target = s + r * unit_at_deg(pl.angle);
  const Point origin = target - rotate(anchor_local(pl.anchor, w, h), rot);
  auto world = [&](Point q) { return origin + rotate(q, rot); };
  return {{world({0, 0}), world({w, 0}), world({w, h}), world({0, h})}, world({0, h / 2}), world({w, h / 2})};
}

// Placements around the gaps between the directions of all lines through s.
std::vector<Placement> bisector_placements(std::vector<double> ray_deg) {
  std::sort(ray_deg.begin(), ray_deg.end());
  std::vector<Placement> out;
  for (std::size_t i = 0; i < ray_deg.size(); ++i) {
    const double a = ray_deg[i];
    const double b = i + 1 < ray_deg.size() ? ray_deg[i + 1] : ray_deg[0] + 360.0;
    if (b - a < 1e-6) continue;
    double mid = std::fmod(0.5 * (a + b), 360.0);
    const Point u = unit_at_deg(mid);
    Anchor anc = u.x > 0.38 ? A::ML : u.x < -0.38 ? A::MR : u.y > 0 ? A::BM : A::TM;
    out.push_back({mid, 0, anc});
  }
  return out;
}

const std::vector<Placement>& crossing_table(Dir own, Dir other, bool& found) {
  found = true;
  auto is_diag = [](Dir d) { return d == Dir::DiagUp || d == Dir::DiagDown; };
  const Dir a = own, b = other;
  if ((a == Dir::H && b == Dir::V) || (a == Dir::V && b == Dir::H)) return kCrossHV;
  if (is_diag(a) && is_diag(b) && a != b) return kCrossDD;
  auto pick = [&](Dir straight, Dir diag) -> const std::vector<Placement>& {
    if (straight == Dir::H) return diag == Dir::DiagUp ? kCrossHDUp : kCrossHDDown;
    return diag == Dir::DiagUp ? kCrossVDUp : kCrossVDDown;
  };
  if (!is_diag(a) && is_diag(b)) return pick(a, b);
  if (is_diag(a) && !is_diag(b)) return pick(b, a);
  found = false;
  return kHorizontal;
}

}  // namespace

std::vector<Candidate> generate_octilinear(const MetroMap& map, int line_index, const Stop& s, const StyleParams& p,
                                           int& id) {
  const MetroLine& line = map.lines[static_cast<std::size_t>(line_index)];
  const auto loc = line.path.locate(s.position);
  const Point seg = line.path.segment_end(loc.segment) - line.path.segment_start(loc.segment);
  const auto own = dir_of(seg);
  if (!own) throw NotOctilinear("stop " + s.id + " lies on a segment that is not octilinear");

  // Other lines passing through the stop.
  std::vector<Point> crossing_dirs;
  for (std::size_t li = 0; li < map.lines.size(); ++li) {
    if (static_cast<int>(li) == line_index) continue;
    const Polyline& other = map.lines[li].path;
    if (!other.bbox().overlaps(BBox{s.position.x, s.position.y, s.position.x, s.position.y}, kSnapTolerance))
      continue;
    for (std::size_t i = 0; i < other.segment_count(); ++i) {
      if (distance_point_segment(s.position, other.segment_start(i), other.segment_end(i)) <= kSnapTolerance) {
        crossing_dirs.push_back(other.segment_end(i) - other.segment_start(i));
        break;
      }
    }
  }

  const std::vector<Placement>* table = nullptr;
  std::vector<Placement> generic;
  if (crossing_dirs.empty()) {
    switch (*own) {
      case Dir::H: table = &kHorizontal; break;
      case Dir::V: table = &kVertical; break;
      case Dir::DiagUp: table = &kDiagonalUp; break;
      case Dir::DiagDown: table = &kDiagonalDown; break;
    }
  } else {
    bool found = false;
    if (crossing_dirs.size() == 1) {
      if (const auto other = dir_of(crossing_dirs[0])) table = &crossing_table(*own, *other, found);
    }
    if (!found) {
      std::vector<double> rays;
      crossing_dirs.push_back(seg);
      for (const Point d : crossing_dirs) {
        const double deg = std::atan2(d.y, d.x) / kDeg;
        rays.push_back(std::fmod(deg + 360.0, 360.0));
        rays.push_back(std::fmod(deg + 540.0, 360.0));
      }
      generic = bisector_placements(std::move(rays));
      table = &generic;
    }
  }

  const SegmentKind kind = *own == Dir::H ? SegmentKind::Horizontal
                           : *own == Dir::V ? SegmentKind::Vertical
                                            : SegmentKind::Diagonal;
  const double w = name_length(s, p);
  const double h = p.label_height * p.scale;
  const double r = p.stop_offset * p.scale;
  std::vector<Candidate> out;
  for (const Placement& pl : *table) {
    Rect rect = place(pl, s.position, w, h, r);
    Candidate c;
    c.polygon = SimplePolygon::trusted(std::move(rect.corners));
    try {
      c.side = side_of(line.path, c.polygon, s.position);
    } catch (const AmbiguousSide&) {
      continue;
    }
    const Classification k = classify(rect.start, rect.end);
    c.id = id++;
    c.stop_id = s.id;
    c.alpha = k.alpha;
    c.delta = k.delta;
    c.xdir = k.xdir;
    c.shape = pl.rotation == 0 ? Shape::Horizontal : Shape::Diagonal;
    c.segment = kind;
    c.start_point = rect.start;
    c.end_point = rect.end;
    c.centerline = {rect.start, rect.end};
    out.push_back(std::move(c));
  }
  return out;
}

MapCandidates generate_candidates(const MetroMap& map, const StyleParams& p) {
  MapCandidates out(map.lines.size());
  int id = 0;
  for (std::size_t li = 0; li < map.lines.size(); ++li) {
    const MetroLine& line = map.lines[li];
    out[li].resize(line.stops.size());
    for (std::size_t si = 0; si < line.stops.size(); ++si) {
      const Stop& s = line.stops[si];
      auto cands = map.style == StyleKind::Curved ? generate_curved(line, s, p, id)
                                                  : generate_octilinear(map, static_cast<int>(li), s, p, id);
      for (Candidate& c : cands) {
        c.line = static_cast<int>(li);
        c.stop = static_cast<int>(si);
      }
      out[li][si] = std::move(cands);
    }
  }
  return out;
}

}  // namespace metrolabel
