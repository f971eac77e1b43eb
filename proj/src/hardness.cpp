#include "metrolabel/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <tuple>

#include "line_router.hpp"

namespace metrolabel {

namespace {

constexpr int kTurnOffset = 40;  // stop distance from a corner along both legs
constexpr int kMinStep = 55;
constexpr int kMaxStep = 75;
constexpr int kFirstTap = 60;    // first fork branch, relative to the variable column
constexpr int kTapGap = 270;
constexpr int kForkRun = 195;    // continuation stop to the next fork
constexpr int kLastRun = 175;    // continuation stop of the last fork to its corner
constexpr int kBranchRise = 45;  // fork branch stop, sideways from the trunk
constexpr int kLegReach = 65;    // clause leg end, sideways from the clause
constexpr int kLevelBase = 300;
constexpr int kLevelStep = 200;
constexpr double kBoxTol = 1e-6;

Point unit(Heading h) {
  switch (h) {
    case Heading::North: return {0, 1};
    case Heading::East: return {1, 0};
    case Heading::South: return {0, -1};
    case Heading::West: return {-1, 0};
  }
  return {0, 0};
}

bool is_vertical(Heading h) { return h == Heading::North || h == Heading::South; }

Heading reverse(Heading h) {
  switch (h) {
    case Heading::North: return Heading::South;
    case Heading::East: return Heading::West;
    case Heading::South: return Heading::North;
    case Heading::West: return Heading::East;
  }
  return h;
}

LabelSlot toward(Heading h) {
  switch (h) {
    case Heading::North: return LabelSlot::Up;
    case Heading::East: return LabelSlot::Right;
    case Heading::South: return LabelSlot::Down;
    case Heading::West: return LabelSlot::Left;
  }
  return LabelSlot::Up;
}

bool same_box(const BBox& a, const BBox& b) {
  return std::abs(a.min_x - b.min_x) < kBoxTol && std::abs(a.min_y - b.min_y) < kBoxTol &&
         std::abs(a.max_x - b.max_x) < kBoxTol && std::abs(a.max_y - b.max_y) < kBoxTol;
}

// Straight run of `distance` as steps in [kMinStep, kMaxStep], multiples of 5,
// each close to `spacing`.
std::vector<int> split_steps(int distance, int spacing) {
  if (distance == 0) return {};
  if (distance < 0 || distance % 5 != 0)
    throw UnrealizableRoute("run of length " + std::to_string(distance) + " is not a positive multiple of 5");
  const int lo = (distance + kMaxStep - 1) / kMaxStep;
  const int hi = distance / kMinStep;
  if (lo > hi) throw UnrealizableRoute("run of length " + std::to_string(distance) + " cannot be split into steps");
  const int n = std::clamp(static_cast<int>(std::lround(static_cast<double>(distance) / spacing)), lo, hi);
  const int units = distance / 5;
  std::vector<int> steps(n, units / n * 5);
  for (int i = 0; i < units % n; ++i) steps[i] += 5;
  return steps;
}

class Layout {
 public:
  struct Cursor {
    int stop;
    LabelRef label;
  };

  explicit Layout(GadgetKind kind, int spacing = kDefaultSpacing) : spacing_(spacing) { g.kind = kind; }

  void polarity(Polarity in, Polarity out) {
    in_ = in;
    out_ = out;
  }

  int add(const std::string& prefix, Point p, SegmentKind seg, std::vector<SelectableLabel> labels) {
    GadgetStop s;
    s.id = prefix + std::to_string(counter_[prefix]++);
    s.position = p;
    s.segment = seg;
    s.selectable = std::move(labels);
    g.stops.push_back(std::move(s));
    return static_cast<int>(g.stops.size()) - 1;
  }

  // Stop with a backward (index 0) and a forward (index 1) label.
  int add_travel(const std::string& prefix, Point p, Heading travel) {
    return add(prefix, p, is_vertical(travel) ? SegmentKind::Horizontal : SegmentKind::Vertical,
               {{toward(reverse(travel)), in_}, {toward(travel), out_}});
  }

  static LabelRef in(int s) { return {s, 0}; }
  static LabelRef out(int s) { return {s, 1}; }

  void link(LabelRef a, LabelRef b) { g.links.push_back(a < b ? std::pair{a, b} : std::pair{b, a}); }

  Point pos(int s) const { return g.stops[s].position; }

  Cursor straight(Cursor from, Heading travel, int distance, const std::string& prefix) {
    Point p = pos(from.stop);
    for (int step : split_steps(distance, spacing_)) {
      p = p + static_cast<double>(step) * unit(travel);
      const int s = add_travel(prefix, p, travel);
      link(from.label, in(s));
      from = {s, out(s)};
    }
    return from;
  }

  Cursor turn(Cursor from, Heading travel, Heading to, const std::string& prefix) {
    const Point p = pos(from.stop) + kTurnOffset * unit(travel) + kTurnOffset * unit(to);
    const int s = add_travel(prefix, p, to);
    link(from.label, in(s));
    return {s, out(s)};
  }

  Gadget g;

 private:
  int spacing_;
  Polarity in_ = Polarity::Negative;
  Polarity out_ = Polarity::Positive;
  std::map<std::string, int> counter_;
};

template <class Error>
void check_links(const Gadget& g) {
  auto want = g.links;
  std::sort(want.begin(), want.end());
  const auto got = selectable_intersections(g);
  if (got == want) return;
  for (const auto& p : got)
    if (!std::binary_search(want.begin(), want.end(), p))
      throw Error("labels of stops " + g.stops[p.first.stop].id + " and " + g.stops[p.second.stop].id +
                  " intersect unexpectedly");
  for (const auto& p : want)
    if (!std::binary_search(got.begin(), got.end(), p))
      throw Error("prescribed intersection between stops " + g.stops[p.first.stop].id + " and " +
                  g.stops[p.second.stop].id + " is missing");
}

MetroMap empty_map() {
  MetroMap m;
  m.style = StyleKind::Octilinear;
  const LabelGeometry geo;
  m.label = {geo.size, geo.size, geo.offset};
  return m;
}

// Style placements of a stop, each with the index of the selectable label it
// realizes (-1 for none).
std::vector<std::pair<Candidate, int>> placements_of(const GadgetStop& gs) {
  MetroMap m = empty_map();
  const Point d = gs.segment == SegmentKind::Horizontal ? Point{1, 0} : Point{0, 1};
  MetroLine line{"probe", Polyline({gs.position - d, gs.position + d}), {}};
  line.stops.push_back({gs.id, "o", gs.position, "probe", 0});
  m.lines.push_back(std::move(line));
  int id = 0;
  std::vector<std::pair<Candidate, int>> out;
  std::vector<int> matched(gs.selectable.size(), 0);
  for (Candidate& c : generate_octilinear(m, 0, m.lines[0].stops[0], params_for(m, 1.0), id)) {
    int which = -1;
    for (std::size_t k = 0; k < gs.selectable.size(); ++k)
      if (same_box(c.polygon.bbox(), slot_box(gs.position, gs.selectable[k].slot))) {
        ++matched[k];
        which = static_cast<int>(k);
      }
    out.push_back({std::move(c), which});
  }
  if (std::any_of(matched.begin(), matched.end(), [](int k) { return k != 1; }))
    throw EmbeddingConflict("selectable labels of stop " + gs.id + " are not style placements");
  return out;
}

// Map from a gadget's stops and its open line, with every style placement as
// a candidate. Selectable placements must miss the line, all others hit it.
GadgetInstance assemble(const Gadget& g, std::vector<int>* map_order = nullptr) {
  GadgetInstance inst;
  MetroMap& m = inst.map;
  m = empty_map();
  MetroLine line{"C", Polyline(g.line), {}};

  std::vector<std::pair<double, int>> along;
  for (std::size_t k = 0; k < g.stops.size(); ++k)
    along.push_back({line.path.locate(g.stops[k].position).arc_length, static_cast<int>(k)});
  std::sort(along.begin(), along.end());
  for (std::size_t i = 0; i < along.size(); ++i) {
    const GadgetStop& gs = g.stops[along[i].second];
    line.stops.push_back({gs.id, "o", gs.position, "C", static_cast<int>(i)});
  }
  m.lines.push_back(std::move(line));
  const MetroLine& ml = m.lines[0];

  const StyleParams params = params_for(m, 1.0);
  inst.candidates.assign(1, LineCandidates(ml.stops.size()));
  int id = 0;
  for (std::size_t si = 0; si < ml.stops.size(); ++si) {
    const GadgetStop& gs = g.stops[along[si].second];
    for (Candidate& c : generate_octilinear(m, 0, ml.stops[si], params, id)) {
      const bool selectable = std::any_of(gs.selectable.begin(), gs.selectable.end(), [&](const SelectableLabel& l) {
        return same_box(c.polygon.bbox(), slot_box(gs.position, l.slot));
      });
      if (selectable == polygon_intersects_polyline(c.polygon, ml.path))
        throw EmbeddingConflict(selectable ? "line crosses a selectable label of stop " + gs.id
                                           : "line misses a non-selectable label of stop " + gs.id);
      c.line = 0;
      c.stop = static_cast<int>(si);
      inst.candidates[0][si].push_back(std::move(c));
    }
  }
  if (map_order) {
    map_order->clear();
    for (const auto& a : along) map_order->push_back(a.second);
  }
  return inst;
}

template <class Error>
void finish(Gadget& g) {
  check_links<Error>(g);
  std::vector<detail::RouteStop> stops;
  std::vector<BBox> obstacles;
  std::vector<detail::RouteTarget> targets;
  try {
    for (std::size_t k = 0; k < g.stops.size(); ++k) {
      const auto& s = g.stops[k];
      stops.push_back({s.id, s.position, s.segment});
      for (std::size_t l = 0; l < s.selectable.size(); ++l)
        obstacles.push_back(g.label_box({static_cast<int>(k), static_cast<int>(l)}));
      for (auto& [c, which] : placements_of(s))
        if (which < 0) targets.push_back({s.id, std::move(c.polygon)});
    }
    auto routed = detail::route_line(stops, obstacles, targets);
    g.boundary = SimplePolygon::trusted(routed.ring);
    g.line = std::move(routed.open);
    std::vector<int> order;
    auto inst = assemble(g, &order);
    for (std::size_t si = 0; si < order.size(); ++si) g.stops[order[si]].candidates = inst.candidates[0][si];
  } catch (const EmbeddingConflict& e) {
    throw Error(e.what());
  }
}

// ____ embedding plan

struct Occurrence {
  int clause;
  int var;  // 1-based
};

struct SidePlan {
  std::vector<Occurrence> occ;
  std::vector<std::vector<int>> taps_of_var;  // per variable (0-based), occurrence ids left to right
  std::vector<std::array<int, 3>> clause_occ;  // per clause, occurrence ids left to right
};

SidePlan plan_side(const std::vector<std::array<int, 3>>& clauses, const std::vector<int>& levels,
                   const std::vector<int>& pos, int num_vars) {
  SidePlan sp;
  sp.taps_of_var.resize(num_vars);
  std::vector<std::tuple<int, int, int, int, int, int>> keys;  // var pos, group, level key, tie, clause, occ
  for (std::size_t c = 0; c < clauses.size(); ++c) {
    int lo = num_vars, hi = -1;
    for (int lit : clauses[c]) {
      lo = std::min(lo, pos[std::abs(lit) - 1]);
      hi = std::max(hi, pos[std::abs(lit) - 1]);
    }
    for (int lit : clauses[c]) {
      const int v = std::abs(lit);
      const int p = pos[v - 1];
      const int occ = static_cast<int>(sp.occ.size());
      sp.occ.push_back({static_cast<int>(c), v});
      int group = 0, tie = 0;
      if (lo == hi)
        tie = 1;
      else if (p == hi)
        group = 0;
      else if (p == lo)
        group = 2;
      else
        group = 1;
      const int lv = group == 2 ? -levels[c] : levels[c];
      keys.emplace_back(p, group, lv, tie, static_cast<int>(c), occ);
    }
  }
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) {
    const int occ = std::get<5>(k);
    sp.taps_of_var[sp.occ[occ].var - 1].push_back(occ);
  }
  sp.clause_occ.resize(clauses.size());
  std::vector<int> filled(clauses.size(), 0);
  for (const auto& k : keys) {
    const int c = std::get<4>(k);
    sp.clause_occ[c][filled[c]++] = std::get<5>(k);
  }
  return sp;
}

// Tap order as an integer key per occurrence (variable position, rank).
std::vector<long> tap_keys(const SidePlan& sp, const std::vector<int>& pos) {
  std::vector<long> key(sp.occ.size());
  for (std::size_t v = 0; v < sp.taps_of_var.size(); ++v)
    for (std::size_t r = 0; r < sp.taps_of_var[v].size(); ++r)
      key[sp.taps_of_var[v][r]] = static_cast<long>(pos[v]) * 1000 + static_cast<long>(r);
  return key;
}

// Clause arcs must nest or be disjoint; nested arcs sit lower and no leg of
// the outer arc passes through the inner one.
void check_laminar(const SidePlan& sp, const std::vector<int>& levels, const std::vector<long>& key) {
  const std::size_t n = sp.clause_occ.size();
  auto lo = [&](std::size_t c) { return key[sp.clause_occ[c][0]]; };
  auto mid = [&](std::size_t c) { return key[sp.clause_occ[c][1]]; };
  auto hi = [&](std::size_t c) { return key[sp.clause_occ[c][2]]; };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (hi(a) < lo(b) || hi(b) < lo(a)) continue;
      std::size_t outer = a, inner = b;
      if (lo(b) < lo(a) && hi(a) < hi(b))
        std::swap(outer, inner);
      else if (!(lo(a) < lo(b) && hi(b) < hi(a)))
        throw EmbeddingConflict("clauses " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " cross");
      if (levels[inner] >= levels[outer])
        throw EmbeddingConflict("clause " + std::to_string(inner + 1) + " must sit below clause " +
                                std::to_string(outer + 1));
      if (lo(inner) < mid(outer) && mid(outer) < hi(inner))
        throw EmbeddingConflict("middle leg of clause " + std::to_string(outer + 1) + " crosses clause " +
                                std::to_string(inner + 1));
    }
}

std::vector<int> positions_of(const MonotoneFormula& f) {
  std::vector<int> pos(f.num_vars);
  for (std::size_t i = 0; i < f.order.size(); ++i) pos[f.order[i] - 1] = static_cast<int>(i);
  return pos;
}

struct Plan {
  std::array<SidePlan, 2> side;        // positive, negative
  std::vector<int> var_x;              // per variable (0-based)
  std::array<std::vector<int>, 2> tap_x;  // per occurrence
};

int side_width(std::size_t taps) { return taps <= 1 ? 0 : kFirstTap + kTapGap * static_cast<int>(taps - 1); }

int tap_offset(std::size_t taps, std::size_t rank) {
  return taps <= 1 ? 0 : kFirstTap + kTapGap * static_cast<int>(rank);
}

Plan make_plan(const MonotoneFormula& f) {
  const auto pos = positions_of(f);
  Plan plan;
  plan.side[0] = plan_side(f.positive_clauses, f.positive_levels, pos, f.num_vars);
  plan.side[1] = plan_side(f.negative_clauses, f.negative_levels, pos, f.num_vars);
  check_laminar(plan.side[0], f.positive_levels, tap_keys(plan.side[0], pos));
  check_laminar(plan.side[1], f.negative_levels, tap_keys(plan.side[1], pos));
  plan.var_x.assign(f.num_vars, 0);
  int x = 0;
  for (int v : f.order) {
    plan.var_x[v - 1] = x;
    const std::size_t tp = plan.side[0].taps_of_var[v - 1].size();
    const std::size_t tn = plan.side[1].taps_of_var[v - 1].size();
    x += std::max(side_width(tp), side_width(tn)) + kTapGap;
  }
  for (int s = 0; s < 2; ++s) {
    plan.tap_x[s].assign(plan.side[s].occ.size(), 0);
    for (int v = 0; v < f.num_vars; ++v) {
      const auto& taps = plan.side[s].taps_of_var[v];
      for (std::size_t r = 0; r < taps.size(); ++r) plan.tap_x[s][taps[r]] = plan.var_x[v] + tap_offset(taps.size(), r);
    }
  }
  return plan;
}

// Levels from span nesting; equal spans are ordered by `priority`.
std::vector<int> nesting_levels(const std::vector<std::array<int, 3>>& clauses, const std::vector<int>& pos,
                                const std::vector<int>& priority) {
  const std::size_t n = clauses.size();
  std::vector<std::pair<int, int>> span(n);
  for (std::size_t c = 0; c < n; ++c) {
    int lo = 1 << 30, hi = -1;
    for (int lit : clauses[c]) {
      lo = std::min(lo, pos[std::abs(lit) - 1]);
      hi = std::max(hi, pos[std::abs(lit) - 1]);
    }
    span[c] = {lo, hi};
  }
  auto inside = [&](std::size_t d, std::size_t c) {
    if (d == c) return false;
    const bool covers = span[c].first <= span[d].first && span[d].second <= span[c].second;
    if (!covers) return false;
    return span[c] != span[d] || priority[d] < priority[c];
  };
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const int wa = span[a].second - span[a].first, wb = span[b].second - span[b].first;
    return std::tie(wa, priority[a]) < std::tie(wb, priority[b]);
  });
  std::vector<int> level(n, 1);
  for (std::size_t c : idx)
    for (std::size_t d = 0; d < n; ++d)
      if (inside(d, c)) level[c] = std::max(level[c], level[d] + 1);
  return level;
}

std::optional<std::vector<int>> side_levels(const std::vector<std::array<int, 3>>& clauses, const std::vector<int>& pos,
                                            int num_vars) {
  std::vector<int> priority(clauses.size());
  std::iota(priority.begin(), priority.end(), 0);
  const bool permute = clauses.size() <= 6;
  do {
    auto levels = nesting_levels(clauses, pos, priority);
    const SidePlan sp = plan_side(clauses, levels, pos, num_vars);
    try {
      check_laminar(sp, levels, tap_keys(sp, pos));
      return levels;
    } catch (const EmbeddingConflict&) {
    }
  } while (permute && std::next_permutation(priority.begin(), priority.end()));
  return std::nullopt;
}

struct Tap {
  Layout::Cursor cursor;
  int x;
  int rise;  // distance of the port stop from the variable row
};

// Chain, forks and free ports on one side of a variable column.
std::vector<Tap> build_side(Layout& L, const std::string& prefix, Point origin, std::size_t count, int sign,
                            Layout::Cursor source, std::vector<Polarity>& forks) {
  std::vector<Tap> taps;
  if (count == 0) return taps;
  const Heading up = sign > 0 ? Heading::North : Heading::South;
  if (sign > 0)
    L.polarity(Polarity::Negative, Polarity::Positive);
  else
    L.polarity(Polarity::Positive, Polarity::Negative);
  const Polarity fork_polarity = sign > 0 ? Polarity::Positive : Polarity::Negative;
  if (count == 1) {
    taps.push_back({source, static_cast<int>(origin.x), 30});
    return taps;
  }
  auto cur = L.straight(source, up, 60, prefix);
  cur = L.turn(cur, up, Heading::East, prefix);
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const int s1 = cur.stop;
    const Point p = L.pos(s1);
    const int s2 = L.add_travel(prefix, p + Point{20, static_cast<double>(kBranchRise * sign)}, up);
    const int s3 = L.add_travel(prefix, p + Point{75, 0}, Heading::East);
    L.link(Layout::out(s1), Layout::in(s2));
    L.link(Layout::out(s1), Layout::in(s3));
    forks.push_back(fork_polarity);
    taps.push_back({{s2, Layout::out(s2)}, static_cast<int>(p.x) + 20, static_cast<int>((p.y - origin.y) * sign) + kBranchRise});
    cur = {s3, Layout::out(s3)};
    if (i + 2 < count) {
      cur = L.straight(cur, Heading::East, kForkRun, prefix);
    } else {
      cur = L.straight(cur, Heading::East, kLastRun, prefix);
      cur = L.turn(cur, Heading::East, up, prefix);
      taps.push_back({cur, static_cast<int>(L.pos(cur.stop).x), 170});
    }
  }
  return taps;
}

struct VariableParts {
  int h1, h2;
  std::vector<Tap> negative, positive;
  std::vector<Polarity> forks;
};

VariableParts add_variable(Layout& L, const std::string& prefix, Point origin, std::size_t s, std::size_t t) {
  VariableParts v;
  L.polarity(Polarity::Negative, Polarity::Positive);
  v.h1 = L.add_travel(prefix + "h", origin + Point{0, -30}, Heading::North);
  v.h2 = L.add_travel(prefix + "h", origin + Point{0, 30}, Heading::North);
  L.link(Layout::out(v.h1), Layout::in(v.h2));
  v.negative = build_side(L, prefix + "n", origin, s, -1, {v.h1, Layout::in(v.h1)}, v.forks);
  v.positive = build_side(L, prefix + "p", origin, t, +1, {v.h2, Layout::out(v.h2)}, v.forks);
  return v;
}

}  // namespace

SimplePolygon slot_shape(Point s, LabelSlot slot, const LabelGeometry& g) {
  const double a = g.size, h = a / 2, r = g.offset;
  auto box = [](double x0, double y0, double x1, double y1) {
    return SimplePolygon::trusted({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
  };
  auto diamond = [&](double sx, double sy) {
    const double d = (r + h) / std::numbers::sqrt2, e = a / std::numbers::sqrt2;
    const Point c{s.x + sx * d, s.y + sy * d};
    return SimplePolygon::trusted({{c.x, c.y - e}, {c.x + e, c.y}, {c.x, c.y + e}, {c.x - e, c.y}});
  };
  switch (slot) {
    case LabelSlot::Up: return box(s.x - h, s.y + r, s.x + h, s.y + r + a);
    case LabelSlot::Down: return box(s.x - h, s.y - r - a, s.x + h, s.y - r);
    case LabelSlot::Right: return box(s.x + r, s.y - h, s.x + r + a, s.y + h);
    case LabelSlot::Left: return box(s.x - r - a, s.y - h, s.x - r, s.y + h);
    case LabelSlot::UpLeft: return box(s.x - a, s.y + r, s.x, s.y + r + a);
    case LabelSlot::UpRight: return box(s.x, s.y + r, s.x + a, s.y + r + a);
    case LabelSlot::DownLeft: return box(s.x - a, s.y - r - a, s.x, s.y - r);
    case LabelSlot::DownRight: return box(s.x, s.y - r - a, s.x + a, s.y - r);
    case LabelSlot::NorthEast: return diamond(1, 1);
    case LabelSlot::NorthWest: return diamond(-1, 1);
    case LabelSlot::SouthEast: return diamond(1, -1);
    case LabelSlot::SouthWest: return diamond(-1, -1);
  }
  return {};
}

BBox slot_box(Point s, LabelSlot slot, const LabelGeometry& g) { return slot_shape(s, slot, g).bbox(); }

SimplePolygon Gadget::label_shape(LabelRef r, const LabelGeometry& g) const {
  const GadgetStop& s = stops[r.stop];
  return slot_shape(s.position, s.selectable[r.label].slot, g);
}

BBox Gadget::label_box(LabelRef r, const LabelGeometry& g) const { return label_shape(r, g).bbox(); }

std::vector<std::pair<LabelRef, LabelRef>> selectable_intersections(const Gadget& g) {
  std::vector<std::pair<LabelRef, LabelRef>> out;
  std::vector<std::pair<LabelRef, SimplePolygon>> all;
  for (std::size_t k = 0; k < g.stops.size(); ++k)
    for (std::size_t l = 0; l < g.stops[k].selectable.size(); ++l) {
      const LabelRef r{static_cast<int>(k), static_cast<int>(l)};
      all.push_back({r, g.label_shape(r)});
    }
  for (std::size_t a = 0; a < all.size(); ++a)
    for (std::size_t b = a + 1; b < all.size(); ++b)
      if (all[a].first.stop != all[b].first.stop && polygons_intersect(all[a].second, all[b].second))
        out.push_back({all[a].first, all[b].first});
  std::sort(out.begin(), out.end());
  return out;
}

// ____ formulas

void validate(const MonotoneFormula& f) {
  if (f.num_vars < 1) throw InvalidFormula("formula needs at least one variable");
  auto check = [&](const std::vector<std::array<int, 3>>& clauses, int sign, const char* what) {
    for (const auto& c : clauses)
      for (int lit : c)
        if (lit * sign < 1 || std::abs(lit) > f.num_vars)
          throw InvalidFormula(std::string("literal ") + std::to_string(lit) + " does not fit a " + what + " clause");
  };
  check(f.positive_clauses, +1, "positive");
  check(f.negative_clauses, -1, "negative");
  if (f.order.empty()) {
    if (!f.positive_levels.empty() || !f.negative_levels.empty())
      throw InvalidFormula("clause levels given without a variable order");
    return;
  }
  std::vector<int> sorted = f.order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> want(f.num_vars);
  std::iota(want.begin(), want.end(), 1);
  if (sorted != want) throw InvalidFormula("variable order must be a permutation of 1..num_vars");
  if (f.positive_levels.size() != f.positive_clauses.size() || f.negative_levels.size() != f.negative_clauses.size())
    throw InvalidFormula("need one level per clause");
  for (const auto* lv : {&f.positive_levels, &f.negative_levels})
    for (int l : *lv)
      if (l < 1) throw InvalidFormula("clause levels start at 1");
}

bool evaluate(const MonotoneFormula& f, const std::vector<bool>& a) {
  for (const auto& c : f.positive_clauses)
    if (std::none_of(c.begin(), c.end(), [&](int lit) { return a[lit - 1]; })) return false;
  for (const auto& c : f.negative_clauses)
    if (std::none_of(c.begin(), c.end(), [&](int lit) { return !a[-lit - 1]; })) return false;
  return true;
}

bool satisfiable(const MonotoneFormula& f) {
  const int n = f.num_vars;
  std::vector<bool> a(n);
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    for (int i = 0; i < n; ++i) a[i] = (mask >> i) & 1UL;
    if (evaluate(f, a)) return true;
  }
  return false;
}

std::optional<MonotoneFormula> with_embedding(MonotoneFormula f) {
  f.order.clear();
  f.positive_levels.clear();
  f.negative_levels.clear();
  validate(f);
  std::vector<int> order(f.num_vars);
  std::iota(order.begin(), order.end(), 1);
  do {
    f.order = order;
    const auto pos = positions_of(f);
    auto lp = side_levels(f.positive_clauses, pos, f.num_vars);
    if (!lp) continue;
    auto ln = side_levels(f.negative_clauses, pos, f.num_vars);
    if (!ln) continue;
    f.positive_levels = std::move(*lp);
    f.negative_levels = std::move(*ln);
    return f;
  } while (std::next_permutation(order.begin(), order.end()));
  return std::nullopt;
}

// ____ gadgets

Gadget build_chain(int length, Point origin, const std::vector<Heading>& route, int spacing) {
  if (length < 2 || length % 2 != 0) throw std::invalid_argument("chain length must be even and at least 2");
  if (route.size() != static_cast<std::size_t>(length))
    throw UnrealizableRoute("route needs one heading per stop");
  if (spacing < kMinStep || spacing > kMaxStep || spacing % 5 != 0)
    throw std::invalid_argument("chain spacing must be a multiple of 5 in [55, 75]");
  Layout L(GadgetKind::Chain, spacing);
  L.g.length = length;
  int prev = L.add_travel("c", origin, route[0]);
  for (int i = 1; i < length; ++i) {
    const Heading a = route[i - 1], b = route[i];
    Point p = L.pos(prev);
    if (a == b)
      p = p + static_cast<double>(spacing) * unit(a);
    else if (b == reverse(a))
      throw UnrealizableRoute("chain route reverses at stop " + std::to_string(i + 1));
    else
      p = p + kTurnOffset * unit(a) + kTurnOffset * unit(b);
    const int s = L.add_travel("c", p, b);
    L.link(Layout::out(prev), Layout::in(s));
    prev = s;
  }
  L.g.ports = {Layout::in(0), Layout::out(prev)};
  finish<UnrealizableRoute>(L.g);
  return std::move(L.g);
}

Gadget build_fork(Point origin, Heading travel, Heading branch, Polarity polarity) {
  if (is_vertical(travel) == is_vertical(branch)) throw std::invalid_argument("fork branch must be perpendicular");
  if (polarity == Polarity::None) throw std::invalid_argument("fork needs a polarity");
  Layout L(GadgetKind::Fork);
  if (polarity == Polarity::Negative)
    L.polarity(Polarity::Positive, Polarity::Negative);
  else
    L.polarity(Polarity::Negative, Polarity::Positive);
  const int s1 = L.add_travel("f", origin, travel);
  const int s2 = L.add_travel("f", origin + 20.0 * unit(travel) + static_cast<double>(kBranchRise) * unit(branch), branch);
  const int s3 = L.add_travel("f", origin + 75.0 * unit(travel), travel);
  L.link(Layout::out(s1), Layout::in(s2));
  L.link(Layout::out(s1), Layout::in(s3));
  L.g.ports = {Layout::in(s1), Layout::out(s2), Layout::out(s3)};
  L.g.forks = {polarity};
  finish<EmbeddingConflict>(L.g);
  return std::move(L.g);
}

namespace {

struct ClauseParts {
  int s1, s2;
};

ClauseParts add_clause(Layout& L, const std::string& prefix, Point origin, bool above) {
  const Heading up = above ? Heading::North : Heading::South;
  const double sign = above ? 1.0 : -1.0;
  ClauseParts c;
  c.s1 = L.add(prefix, origin, SegmentKind::Horizontal,
               {{toward(reverse(up)), Polarity::None}, {toward(up), Polarity::None}});
  c.s2 = L.add(prefix, origin + Point{0, 60 * sign}, SegmentKind::Horizontal,
               {{toward(reverse(up)), Polarity::None},
                {above ? LabelSlot::NorthWest : LabelSlot::SouthWest, Polarity::None},
                {above ? LabelSlot::NorthEast : LabelSlot::SouthEast, Polarity::None}});
  L.link({c.s1, 1}, {c.s2, 0});
  return c;
}

}  // namespace

Gadget build_clause(Point origin, bool above) {
  Layout L(GadgetKind::Clause);
  const auto c = add_clause(L, "k", origin, above);
  L.g.ports = {{c.s1, 0}, {c.s2, 1}, {c.s2, 2}};
  finish<EmbeddingConflict>(L.g);
  return std::move(L.g);
}

Gadget build_variable(int s, int t, Point origin) {
  if (s < 1 || t < 1) throw std::invalid_argument("variable needs at least one port per side");
  Layout L(GadgetKind::Variable);
  auto v = add_variable(L, "v", origin, static_cast<std::size_t>(s), static_cast<std::size_t>(t));
  L.g.negative_ports = s;
  L.g.positive_ports = t;
  for (const auto& tap : v.negative) L.g.ports.push_back(tap.cursor.label);
  for (const auto& tap : v.positive) L.g.ports.push_back(tap.cursor.label);
  L.g.forks = v.forks;
  finish<EmbeddingConflict>(L.g);
  return std::move(L.g);
}

GadgetInstance instance_of(const Gadget& g) { return assemble(g); }

// ____ reduction

Reduction reduce(const MonotoneFormula& f, const ReduceOptions& opts) {
  validate(f);
  if (f.order.empty()) throw InvalidFormula("formula has no embedding");
  const Plan plan = make_plan(f);

  Layout L(GadgetKind::Formula, opts.spacing);
  Reduction r;
  r.variable_stops.resize(f.num_vars);
  r.true_labels.resize(f.num_vars);
  std::array<std::vector<Tap>, 2> taps{std::vector<Tap>(plan.side[0].occ.size(), Tap{{0, {}}, 0, 0}),
                                       std::vector<Tap>(plan.side[1].occ.size(), Tap{{0, {}}, 0, 0})};
  for (int v : f.order) {
    const std::string prefix = "x" + std::to_string(v);
    const Point origin{static_cast<double>(plan.var_x[v - 1]), 0};
    const auto& pos_occ = plan.side[0].taps_of_var[v - 1];
    const auto& neg_occ = plan.side[1].taps_of_var[v - 1];
    auto parts = add_variable(L, prefix, origin, neg_occ.size(), pos_occ.size());
    r.variable_stops[v - 1] = L.g.stops[parts.h1].id;
    r.true_labels[v - 1] = slot_box(L.pos(parts.h1), LabelSlot::Down);
    for (std::size_t i = 0; i < pos_occ.size(); ++i) taps[0][pos_occ[i]] = parts.positive[i];
    for (std::size_t i = 0; i < neg_occ.size(); ++i) taps[1][neg_occ[i]] = parts.negative[i];
  }
  for (int s = 0; s < 2; ++s)
    for (std::size_t o = 0; o < taps[s].size(); ++o)
      if (taps[s][o].x != plan.tap_x[s][o]) throw std::logic_error("tap layout drifted from its plan");

  for (int s = 0; s < 2; ++s) {
    const bool above = s == 0;
    const int sign = above ? 1 : -1;
    const Heading up = above ? Heading::North : Heading::South;
    const auto& levels = above ? f.positive_levels : f.negative_levels;
    if (above)
      L.polarity(Polarity::Negative, Polarity::Positive);
    else
      L.polarity(Polarity::Positive, Polarity::Negative);
    for (std::size_t c = 0; c < plan.side[s].clause_occ.size(); ++c) {
      const std::string prefix = std::string(above ? "P" : "N") + std::to_string(c + 1);
      const auto& occ = plan.side[s].clause_occ[c];
      const Tap& left = taps[s][occ[0]];
      const Tap& mid = taps[s][occ[1]];
      const Tap& right = taps[s][occ[2]];
      const int y1 = kLevelBase + kLevelStep * (levels[c] - 1);

      auto cur = L.straight(mid.cursor, up, y1 - 60 - mid.rise, prefix + "m");
      const auto k = add_clause(L, prefix + "k", Point{static_cast<double>(mid.x), static_cast<double>(sign * y1)}, above);
      L.link(cur.label, {k.s1, 0});

      cur = L.straight(left.cursor, up, y1 + 20 + 60 - kTurnOffset - left.rise, prefix + "l");
      cur = L.turn(cur, up, Heading::East, prefix + "l");
      cur = L.straight(cur, Heading::East, mid.x - kLegReach - (left.x + kTurnOffset), prefix + "l");
      L.link(cur.label, {k.s2, 1});

      cur = L.straight(right.cursor, up, y1 + 20 + 60 - kTurnOffset - right.rise, prefix + "r");
      cur = L.turn(cur, up, Heading::West, prefix + "r");
      cur = L.straight(cur, Heading::West, (right.x - kTurnOffset) - (mid.x + kLegReach), prefix + "r");
      L.link(cur.label, {k.s2, 2});
    }
  }
  finish<EmbeddingConflict>(L.g);
  auto inst = assemble(L.g);
  r.map = std::move(inst.map);
  r.candidates = std::move(inst.candidates);
  r.layout = std::move(L.g);
  return r;
}

std::vector<bool> assignment_of(const Reduction& r, const Labeling& labeling) {
  std::vector<bool> a(r.variable_stops.size(), false);
  for (const auto& line : labeling.lines)
    for (const Candidate& c : line.labels)
      for (std::size_t v = 0; v < r.variable_stops.size(); ++v)
        if (c.stop_id == r.variable_stops[v]) a[v] = same_box(c.polygon.bbox(), r.true_labels[v]);
  return a;
}

}  // namespace metrolabel
