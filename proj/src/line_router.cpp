#include "line_router.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <unordered_map>

#include "metrolabel/hardness.hpp"

namespace metrolabel::detail {

namespace {

// Ring of the eight neighbours, counterclockwise from north.
constexpr std::array<int, 8> kRingDx{0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kRingDy{1, 1, 0, -1, -1, -1, 0, 1};

struct GridPoint {
  int i, j;
  friend bool operator==(GridPoint, GridPoint) = default;
};

class Router {
 public:
  Router(const std::vector<RouteStop>& stops, const std::vector<BBox>& obstacles,
         const std::vector<RouteTarget>& targets, double cell)
      : stops_(stops), targets_(targets), cell_(cell) {
    if (stops.empty()) throw EmbeddingConflict("no stops to route");
    constexpr double inf = std::numeric_limits<double>::infinity();
    double lo_x = inf, lo_y = inf, hi_x = -inf, hi_y = -inf;
    auto grow = [&](double x0, double y0, double x1, double y1) {
      lo_x = std::min(lo_x, x0);
      lo_y = std::min(lo_y, y0);
      hi_x = std::max(hi_x, x1);
      hi_y = std::max(hi_y, y1);
    };
    for (const auto& s : stops) grow(s.position.x, s.position.y, s.position.x, s.position.y);
    for (const auto& b : obstacles) grow(b.min_x, b.min_y, b.max_x, b.max_y);
    const double margin = 8 * cell;
    x0_ = std::floor((lo_x - margin) / cell) * cell;
    y0_ = std::floor((lo_y - margin) / cell) * cell;
    nx_ = static_cast<int>(std::ceil((hi_x + margin - x0_) / cell));
    ny_ = static_cast<int>(std::ceil((hi_y + margin - y0_) / cell));
    const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
    blocked_.assign(n, 0);
    region_.assign(n, 0);
    owner_.assign(n, -1);
    pair_of_.assign(n, -1);

    for (int i = 0; i < nx_; ++i) blocked_[at(i, 0)] = blocked_[at(i, ny_ - 1)] = 1;
    for (int j = 0; j < ny_; ++j) blocked_[at(0, j)] = blocked_[at(nx_ - 1, j)] = 1;
    const double pad = 0.2 * cell;
    for (const auto& b : obstacles) {
      const int i0 = std::max(0, static_cast<int>(std::ceil((b.min_x - pad - x0_) / cell - 1)));
      const int i1 = std::min(nx_ - 1, static_cast<int>(std::floor((b.max_x + pad - x0_) / cell)));
      const int j0 = std::max(0, static_cast<int>(std::ceil((b.min_y - pad - y0_) / cell - 1)));
      const int j1 = std::min(ny_ - 1, static_cast<int>(std::floor((b.max_y + pad - y0_) / cell)));
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) blocked_[at(i, j)] = 1;
    }

    pairs_.resize(stops.size());
    owned_.resize(stops.size());
    for (std::size_t k = 0; k < stops.size(); ++k) {
      const auto& s = stops[k];
      const int vi = static_cast<int>(std::lround((s.position.x - x0_) / cell));
      const int vj = static_cast<int>(std::lround((s.position.y - y0_) / cell));
      if (std::abs(x0_ + vi * cell - s.position.x) > 1e-9 || std::abs(y0_ + vj * cell - s.position.y) > 1e-9)
        throw EmbeddingConflict("stop " + s.id + " is not on the routing grid");
      const int bl = at(vi - 1, vj - 1), br = at(vi, vj - 1), tl = at(vi - 1, vj), tr = at(vi, vj);
      if (s.segment == SegmentKind::Horizontal)
        pairs_[k] = {{{bl, br}, {tl, tr}}};
      else
        pairs_[k] = {{{br, tr}, {bl, tl}}};
      for (int p = 0; p < 2; ++p)
        for (int c : pairs_[k][p]) {
          if (blocked_[c]) throw EmbeddingConflict("no room for the line at stop " + s.id);
          pair_of_[c] = static_cast<int>(2 * k) + p;
        }
      for (int j = vj - 2; j <= vj + 1; ++j)
        for (int i = vi - 2; i <= vi + 1; ++i) {
          const int c = at(i, j);
          if (owner_[c] >= 0)
            throw EmbeddingConflict("stops " + stops[owner_[c]].id + " and " + s.id + " are too close");
          owner_[c] = static_cast<int>(k);
          owned_[k].push_back(c);
        }
    }
  }

  RoutedLine run() {
    done_.assign(stops_.size(), 0);
    // seed with the first stop
    const int p0 = (blocked_[pairs_[0][0][0]] || blocked_[pairs_[0][0][1]]) ? 1 : 0;
    region_[pairs_[0][p0][0]] = 1;
    settle(0, p0);
    connect_all();
    reach_targets();
    return trace();
  }

 private:
  int at(int i, int j) const { return j * nx_ + i; }
  bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }
  bool in_region(int i, int j) const { return inside(i, j) && region_[at(i, j)]; }

  std::array<bool, 8> ring(int c) const {
    const int i = c % nx_, j = c / nx_;
    std::array<bool, 8> r{};
    for (int k = 0; k < 8; ++k) r[k] = in_region(i + kRingDx[k], j + kRingDy[k]);
    return r;
  }

  // Adding c keeps the region simply connected with a simple boundary.
  bool addable(int c) const {
    if (region_[c]) return false;
    const auto r = ring(c);
    if (!(r[0] || r[2] || r[4] || r[6])) return false;
    int runs = 0;
    for (int k = 0; k < 8; ++k)
      if (r[k] && !r[(k + 7) % 8]) ++runs;
    return runs == 1;
  }

  bool clear(int c) const {
    const auto r = ring(c);
    return std::none_of(r.begin(), r.end(), [](bool b) { return b; });
  }

  void add(int c) {
    if (!addable(c)) {
      const int i = c % nx_, j = c / nx_;
      throw EmbeddingConflict("line would touch itself near (" + std::to_string(x0_ + i * cell_) + ", " +
                              std::to_string(y0_ + j * cell_) + ")");
    }
    region_[c] = 1;
  }

  void settle(int k, int p) {
    for (int c : pairs_[k][p])
      if (!region_[c]) add(c);
    for (int c : pairs_[k][1 - p]) blocked_[c] = 1;
    for (int c : owned_[k]) owner_[c] = -1;
    done_[k] = 1;
  }

  // Stops join in the given order; one that cannot be reached yet waits
  // for later ones.
  void connect_all() {
    std::vector<int> pending;
    for (std::size_t k = 1; k < stops_.size(); ++k) pending.push_back(static_cast<int>(k));
    while (!pending.empty()) {
      bool progress = false;
      for (auto it = pending.begin(); it != pending.end(); ++it) {
        const int k = *it;
        std::vector<int> goal;
        for (const auto& pair : pairs_[k])
          for (int c : pair) goal.push_back(c);
        if (const auto reached = grow_back(goal)) {
          const int p = pair_of_[*reached] % 2;
          settle(k, p);
          pending.erase(it);
          progress = true;
          break;
        }
      }
      if (!progress) {
        std::string missing;
        for (int k : pending) missing += (missing.empty() ? "" : ", ") + stops_[k].id;
        throw EmbeddingConflict("cannot route the line to stops " + missing);
      }
    }
  }

  // Shortest clear path from a goal cell back to the region, added to it.
  // Returns the goal cell reached.
  std::optional<int> grow_back(const std::vector<int>& goal) {
    std::unordered_map<int, int> parent;
    std::deque<int> queue;
    auto usable = [&](int c) { return !blocked_[c] && !region_[c] && (addable(c) || clear(c)); };
    for (int c : goal)
      if (usable(c)) {
        parent.emplace(c, -1);
        queue.push_back(c);
      }
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      if (addable(v)) {
        int last = v;
        for (int c = v; c != -1; c = parent.at(c)) {
          add(c);
          last = c;
        }
        return last;
      }
      const int i = v % nx_, j = v / nx_;
      constexpr std::array<int, 4> dx{0, 1, 0, -1}, dy{1, 0, -1, 0};
      for (int d = 0; d < 4; ++d) {
        const int a = i + dx[d], b = j + dy[d];
        if (!inside(a, b)) continue;
        const int u = at(a, b);
        if (parent.contains(u) || !usable(u)) continue;
        // stepping u -> v must not leave a reserved square once inside it
        if (owner_[u] >= 0 && owner_[v] != owner_[u]) continue;
        parent.emplace(u, v);
        queue.push_back(u);
      }
    }
    return std::nullopt;
  }

  // Grows a thin spur into every target the boundary does not cross yet.
  void reach_targets() {
    for (const RouteTarget& t : targets_) {
      std::vector<int> goal;
      bool inner = false, outer = false;
      const int i0 = std::max(0, static_cast<int>(std::floor((t.shape.bbox().min_x - x0_) / cell_)));
      const int i1 = std::min(nx_ - 1, static_cast<int>(std::floor((t.shape.bbox().max_x - x0_) / cell_)));
      const int j0 = std::max(0, static_cast<int>(std::floor((t.shape.bbox().min_y - y0_) / cell_)));
      const int j1 = std::min(ny_ - 1, static_cast<int>(std::floor((t.shape.bbox().max_y - y0_) / cell_)));
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
          const double x = x0_ + i * cell_, y = y0_ + j * cell_, in = 0.1 * cell_;
          const SimplePolygon sq = SimplePolygon::trusted(
              {{x + in, y + in}, {x + cell_ - in, y + in}, {x + cell_ - in, y + cell_ - in}, {x + in, y + cell_ - in}});
          if (!polygons_intersect(sq, t.shape)) continue;
          const int c = at(i, j);
          (region_[c] ? inner : outer) = true;
          if (!blocked_[c]) goal.push_back(c);
        }
      if (inner && outer) continue;
      if (inner || !grow_back(goal))
        throw EmbeddingConflict("line cannot reach a label placement of stop " + t.stop + " near (" +
                                std::to_string(t.shape.bbox().min_x) + ", " + std::to_string(t.shape.bbox().min_y) +
                                ")" + (inner ? " (covered)" : ""));
    }
  }

  RoutedLine trace() const {
    const int w = nx_ + 1;
    auto vid = [&](int i, int j) { return j * w + i; };
    std::vector<int> next(static_cast<std::size_t>(w) * (ny_ + 1), -1);
    std::size_t edges = 0;
    auto put = [&](int a, int b) {
      if (next[a] != -1) throw EmbeddingConflict("line region touches itself");
      next[a] = b;
      ++edges;
    };
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) {
        if (!region_[at(i, j)]) continue;
        if (!in_region(i, j - 1)) put(vid(i, j), vid(i + 1, j));
        if (!in_region(i + 1, j)) put(vid(i + 1, j), vid(i + 1, j + 1));
        if (!in_region(i, j + 1)) put(vid(i + 1, j + 1), vid(i, j + 1));
        if (!in_region(i - 1, j)) put(vid(i, j + 1), vid(i, j));
      }
    const auto first = std::find_if(next.begin(), next.end(), [](int v) { return v != -1; });
    const int start = static_cast<int>(first - next.begin());
    std::vector<GridPoint> cycle;
    int v = start;
    do {
      cycle.push_back({v % w, v / w});
      v = next[v];
    } while (v != start && cycle.size() <= edges);
    if (cycle.size() != edges) throw EmbeddingConflict("line region is not simply connected");

    auto point = [&](GridPoint g) { return Point{x0_ + g.i * cell_, y0_ + g.j * cell_}; };
    auto far_from_stops = [&](GridPoint g, double d) {
      const Point p = point(g);
      return std::all_of(stops_.begin(), stops_.end(), [&](const RouteStop& s) { return norm(s.position - p) > d; });
    };
    const std::size_t m = cycle.size();
    std::size_t cut = m;
    for (double d : {14.0 * cell_, 2.0 * cell_}) {
      for (std::size_t e = 0; e < m && cut == m; ++e)
        if (far_from_stops(cycle[e], d) && far_from_stops(cycle[(e + 1) % m], d)) cut = e;
      if (cut != m) break;
    }
    if (cut == m) throw EmbeddingConflict("no place to cut the line open");

    RoutedLine out;
    out.ring = simplify(cycle, true, point);
    std::vector<GridPoint> open;
    for (std::size_t k = 1; k <= m; ++k) open.push_back(cycle[(cut + k) % m]);
    out.open = simplify(open, false, point);
    return out;
  }

  template <class ToPoint>
  static std::vector<Point> simplify(const std::vector<GridPoint>& pts, bool closed, ToPoint to_point) {
    const std::size_t m = pts.size();
    std::vector<Point> out;
    for (std::size_t k = 0; k < m; ++k) {
      const bool endpoint = !closed && (k == 0 || k + 1 == m);
      if (!endpoint) {
        const GridPoint a = pts[(k + m - 1) % m], b = pts[k], c = pts[(k + 1) % m];
        const bool collinear = (b.i - a.i) * (c.j - b.j) - (b.j - a.j) * (c.i - b.i) == 0;
        if (collinear) continue;
      }
      out.push_back(to_point(pts[k]));
    }
    return out;
  }

  const std::vector<RouteStop>& stops_;
  const std::vector<RouteTarget>& targets_;
  double cell_;
  double x0_ = 0, y0_ = 0;
  int nx_ = 0, ny_ = 0;
  std::vector<char> blocked_, region_, done_;
  std::vector<int> owner_;    // stop whose reserved square holds the cell
  std::vector<std::vector<int>> owned_;
  std::vector<int> pair_of_;  // 2*stop + pair for the four cells around a stop
  std::vector<std::array<std::array<int, 2>, 2>> pairs_;
};

}  // namespace

RoutedLine route_line(const std::vector<RouteStop>& stops, const std::vector<BBox>& obstacles,
                      const std::vector<RouteTarget>& targets, double cell) {
  Router r(stops, obstacles, targets, cell);
  return r.run();
}

}  // namespace metrolabel::detail
