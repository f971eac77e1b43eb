#include "metrolabel/single_line.hpp"

#include <algorithm>
#include <limits>

namespace metrolabel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool disjoint(const Candidate& a, const Candidate& b) {
  if (!a.polygon.bbox().overlaps(b.polygon.bbox())) return true;
  return !polygons_intersect(a.polygon, b.polygon);
}

// Per-stop and consecutive-pair quantities computed once per solve.
class Tables {
 public:
  explicit Tables(const LineInstance& inst) : inst_(inst), n_(static_cast<int>(inst.candidates.size())) {
    w1_.resize(n_);
    for (int j = 0; j < n_; ++j)
      for (const Candidate& c : inst.candidates[j]) w1_[j].push_back(w1(c, inst.style, inst.weights));
    pair_w2_.resize(n_ > 0 ? n_ - 1 : 0);
    pair_ok_.resize(pair_w2_.size());
    for (int j = 0; j + 1 < n_; ++j) {
      const auto& here = inst.candidates[j];
      const auto& next = inst.candidates[j + 1];
      pair_w2_[j].resize(here.size() * next.size());
      pair_ok_[j].resize(here.size() * next.size());
      for (std::size_t a = 0; a < here.size(); ++a)
        for (std::size_t b = 0; b < next.size(); ++b) {
          pair_w2_[j][a * next.size() + b] = w2(here[a], next[b], inst.weights);
          pair_ok_[j][a * next.size() + b] = disjoint(here[a], next[b]) ? 1 : 0;
        }
    }
  }

  int stops() const { return n_; }
  int count(int j) const { return static_cast<int>(inst_.candidates[j].size()); }
  const Candidate& cand(int j, int c) const { return inst_.candidates[j][c]; }
  Side side(int j, int c) const { return inst_.candidates[j][c].side; }
  double w1v(int j, int c) const { return w1_[j][c]; }
  // a at j, b at j+1
  double w2v(int j, int a, int b) const { return pair_w2_[j][a * count(j + 1) + b]; }
  bool ok(int j, int a, int b) const { return pair_ok_[j][a * count(j + 1) + b] != 0; }

 private:
  const LineInstance& inst_;
  int n_;
  std::vector<std::vector<double>> w1_;
  std::vector<std::vector<double>> pair_w2_;
  std::vector<std::vector<std::uint8_t>> pair_ok_;
};

// Backward cost-to-go over stops [0, last] restricted to one side. The
// last stop admits only the candidates `terminal` marks finite, seeded with
// the given value.
struct Backward {
  std::vector<std::vector<double>> to_go;   // includes w1 of the label itself
  std::vector<std::vector<double>> entry;   // to_go minus own w1, for j < last
  std::vector<std::vector<int>> next;       // argmin successor index
};

Backward backward(const Tables& t, Side side, int last, const std::vector<double>& terminal,
                  std::uint64_t* relax = nullptr) {
  Backward b;
  b.to_go.resize(last + 1);
  b.entry.resize(last + 1);
  b.next.resize(last + 1);
  b.to_go[last] = terminal;
  for (int j = last - 1; j >= 0; --j) {
    const int k = t.count(j), k2 = t.count(j + 1);
    b.to_go[j].assign(k, kInf);
    b.entry[j].assign(k, kInf);
    b.next[j].assign(k, -1);
    for (int c = 0; c < k; ++c) {
      if (t.side(j, c) != side) continue;
      double best = kInf;
      int arg = -1;
      for (int c2 = 0; c2 < k2; ++c2) {
        const double rest = b.to_go[j + 1][c2];
        if (rest == kInf) continue;
        if (relax) ++*relax;
        if (!t.ok(j, c, c2)) continue;
        const double v = t.w2v(j, c, c2) + rest;
        if (v < best) {
          best = v;
          arg = c2;
        }
      }
      if (arg < 0) continue;
      b.entry[j][c] = best;
      b.next[j][c] = arg;
      b.to_go[j][c] = t.w1v(j, c) + best;
    }
  }
  return b;
}

int argmin(const std::vector<double>& v) {
  int arg = -1;
  double best = kInf;
  for (int i = 0; i < static_cast<int>(v.size()); ++i)
    if (v[i] < best) {
      best = v[i];
      arg = i;
    }
  return arg;
}

LineSolution finish(const LineInstance& inst, std::vector<int> choice) {
  LineSolution s;
  s.choice = std::move(choice);
  std::vector<const Candidate*> labels;
  for (std::size_t j = 0; j < s.choice.size(); ++j) labels.push_back(&inst.candidates[j][s.choice[j]]);
  s.cost = line_cost(labels, inst.style, inst.weights);
  s.switchovers = switchovers_of(labels);
  return s;
}

// Switchover graph machinery shared by solve_two_sided and compatible().
class TwoSided {
 public:
  explicit TwoSided(const LineInstance& inst) : inst_(inst), t_(inst) {
    n_ = t_.stops();
    if (n_ == 0) return;
    for (Side s : {Side::Left, Side::Right}) suffix_[static_cast<int>(s)] = suffix(s);
  }

  const Tables& tables() const { return t_; }
  int stops() const { return n_; }

  // Cost-to-go over stops [j, n) on one side.
  struct Suffix {
    std::vector<std::vector<double>> to_go;
    std::vector<std::vector<int>> next;
  };

  // DP for a real switchover v, covering stops [0, v.position + 1].
  struct Segment {
    Backward dp;
    int position = 0;
    int first = 0, second = 0;
    Side side = Side::Left;
  };

  Segment segment(const SwitchoverRef& v) const {
    Segment s;
    s.position = v.position;
    s.first = v.first;
    s.second = v.second;
    s.side = t_.side(v.position, v.first);
    std::vector<double> term(t_.count(v.position), kInf);
    term[v.first] = t_.w1v(v.position, v.first) + t_.w2v(v.position, v.first, v.second) +
                    t_.w1v(v.position + 1, v.second);
    s.dp = backward(t_, s.side, v.position, term);
    return s;
  }

  double bottom_edge(const Segment& v, int* start = nullptr) const {
    const int c = argmin(v.dp.to_go[0]);
    if (start) *start = c;
    return c < 0 ? kInf : v.dp.to_go[0][c];
  }

  // Edge cost u -> v, or infinity when not compatible.
  double edge(const SwitchoverRef& u, const Segment& v) const {
    const int entry = u.position + 1;
    if (entry > v.position) return kInf;
    if (t_.side(entry, u.second) != v.side) return kInf;
    const double gap = inst_.weights.switchover_gap_factor / (v.position - u.position);
    double rest;
    if (entry == v.position) {
      if (u.second != v.first) return kInf;
      rest = t_.w2v(v.position, v.first, v.second) + t_.w1v(v.position + 1, v.second);
    } else {
      rest = v.dp.entry[entry][u.second];
      if (rest == kInf) return kInf;
    }
    if (!disjoint(t_.cand(u.position, u.first), t_.cand(v.position + 1, v.second))) return kInf;
    return gap + rest;
  }

  // u -> top: finish on u's second side.
  double top_edge(const SwitchoverRef& u, int* next = nullptr) const {
    const int entry = u.position + 1;
    if (next) *next = -1;
    if (entry == n_ - 1) return 0.0;
    const Side side = t_.side(entry, u.second);
    const Suffix& s = suffix_[static_cast<int>(side)];
    double best = kInf;
    for (int c = 0; c < t_.count(entry + 1); ++c) {
      const double rest = s.to_go[entry + 1][c];
      if (rest == kInf || !t_.ok(entry, u.second, c)) continue;
      const double v = t_.w2v(entry, u.second, c) + rest;
      if (v < best) {
        best = v;
        if (next) *next = c;
      }
    }
    return best;
  }

  double bottom_top(Side* side, int* start) const {
    double best = kInf;
    for (Side s : {Side::Left, Side::Right}) {
      const auto& first = suffix_[static_cast<int>(s)].to_go[0];
      const int c = argmin(first);
      if (c >= 0 && first[c] < best) {
        best = first[c];
        *side = s;
        *start = c;
      }
    }
    return best;
  }

  // Writes the labels of stops [from, v.position + 1] following v's DP,
  // starting with candidate c at stop `from`.
  void trace(const Segment& v, int from, int c, std::vector<int>& choice) const {
    for (int j = from; j < v.position; ++j) {
      choice[j] = c;
      c = v.dp.next[j][c];
    }
    choice[v.position] = v.first;
    choice[v.position + 1] = v.second;
  }

  void trace_suffix(Side side, int from, int c, std::vector<int>& choice) const {
    const Suffix& s = suffix_[static_cast<int>(side)];
    for (int j = from; j < n_; ++j) {
      choice[j] = c;
      if (j + 1 < n_) c = s.next[j][c];
    }
  }

 private:
  Suffix suffix(Side side) const {
    Suffix s;
    std::vector<double> term(t_.count(n_ - 1), kInf);
    for (int c = 0; c < t_.count(n_ - 1); ++c)
      if (t_.side(n_ - 1, c) == side) term[c] = t_.w1v(n_ - 1, c);
    Backward b = backward(t_, side, n_ - 1, term);
    s.to_go = std::move(b.to_go);
    s.next = std::move(b.next);
    return s;
  }

  const LineInstance& inst_;
  Tables t_;
  int n_ = 0;
  Suffix suffix_[2];
};

int index_of_id(const StopCandidates& cs, int id) {
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (cs[i].id == id) return static_cast<int>(i);
  return -1;
}

std::optional<SwitchoverRef> resolve(const LineInstance& inst, const Switchover& s) {
  if (s.is_dummy()) return std::nullopt;
  if (s.position < 0 || s.position + 1 >= static_cast<int>(inst.candidates.size()))
    throw std::out_of_range("switchover position outside the line");
  const int a = index_of_id(inst.candidates[s.position], s.first_id);
  const int b = index_of_id(inst.candidates[s.position + 1], s.second_id);
  if (a < 0 || b < 0) throw std::out_of_range("switchover candidate not in the instance");
  return SwitchoverRef{s.position, a, b};
}

}  // namespace

std::vector<Candidate> materialize(const LineInstance& inst, const LineSolution& s) {
  std::vector<Candidate> out;
  out.reserve(s.choice.size());
  for (std::size_t j = 0; j < s.choice.size(); ++j) out.push_back(inst.candidates[j][s.choice[j]]);
  return out;
}

std::vector<SwitchoverRef> enumerate_switchovers(const LineInstance& inst) {
  std::vector<SwitchoverRef> out;
  const int n = static_cast<int>(inst.candidates.size());
  for (int j = 0; j + 1 < n; ++j) {
    const auto& here = inst.candidates[j];
    const auto& next = inst.candidates[j + 1];
    std::vector<SwitchoverRef> at;
    for (int a = 0; a < static_cast<int>(here.size()); ++a)
      for (int b = 0; b < static_cast<int>(next.size()); ++b)
        if (here[a].side != next[b].side && disjoint(here[a], next[b])) at.push_back({j, a, b});
    std::sort(at.begin(), at.end(), [&](const SwitchoverRef& x, const SwitchoverRef& y) {
      const int xa = here[x.first].id, ya = here[y.first].id;
      if (xa != ya) return xa < ya;
      return next[x.second].id < next[y.second].id;
    });
    out.insert(out.end(), at.begin(), at.end());
  }
  return out;
}

std::vector<Switchover> to_switchovers(const LineInstance& inst, const std::vector<SwitchoverRef>& refs) {
  std::vector<Switchover> out;
  out.reserve(refs.size());
  for (const auto& r : refs)
    out.push_back({SwitchoverKind::Real, r.position, inst.candidates[r.position][r.first].id,
                   inst.candidates[r.position + 1][r.second].id});
  return out;
}

std::optional<LineSolution> solve_one_sided(const LineInstance& inst, Side side, std::optional<int> fixed_head,
                                            std::optional<int> fixed_tail, SolveCounters* counters) {
  const int n = static_cast<int>(inst.candidates.size());
  if (n == 0) return LineSolution{};
  Tables t(inst);
  std::uint64_t relax = 0;
  std::vector<double> term(t.count(n - 1), kInf);
  for (int c = 0; c < t.count(n - 1); ++c) {
    if (t.side(n - 1, c) != side || (fixed_tail && *fixed_tail != c)) continue;
    if (n == 1 && fixed_head && *fixed_head != c) continue;
    ++relax;  // edge into the target
    term[c] = t.w1v(n - 1, c);
  }
  Backward b = backward(t, side, n - 1, term, &relax);
  std::vector<double> first = b.to_go[0];
  if (fixed_head)
    for (int c = 0; c < static_cast<int>(first.size()); ++c)
      if (c != *fixed_head) first[c] = kInf;
  relax += first.size();  // edges out of the source
  if (counters) counters->relaxations += relax;
  int c = argmin(first);
  if (c < 0) return std::nullopt;
  std::vector<int> choice(n);
  for (int j = 0; j < n; ++j) {
    choice[j] = c;
    if (j + 1 < n) c = b.next[j][c];
  }
  return finish(inst, std::move(choice));
}

std::optional<SegmentSolution> compatible(const LineInstance& inst, const Switchover& from, const Switchover& to) {
  const int n = static_cast<int>(inst.candidates.size());
  if (n == 0) return std::nullopt;
  if (from.kind == SwitchoverKind::Top || to.kind == SwitchoverKind::Bottom) return std::nullopt;
  TwoSided g(inst);
  const auto u = resolve(inst, from);
  const auto v = resolve(inst, to);
  std::vector<int> choice(n, -1);
  SegmentSolution out;
  out.first_stop = u ? u->position + 2 : 0;
  int last = n - 1;

  if (v) {
    if (u && u->position >= v->position) return std::nullopt;
    const auto seg = g.segment(*v);
    last = v->position + 1;
    if (!u) {
      int start = -1;
      out.cost = g.bottom_edge(seg, &start);
      if (out.cost == std::numeric_limits<double>::infinity()) return std::nullopt;
      g.trace(seg, 0, start, choice);
    } else {
      out.cost = g.edge(*u, seg);
      if (out.cost == std::numeric_limits<double>::infinity()) return std::nullopt;
      const int entry = u->position + 1;
      if (entry == v->position) {
        choice[v->position + 1] = v->second;
      } else {
        g.trace(seg, entry + 1, seg.dp.next[entry][u->second], choice);
      }
    }
  } else if (!u) {
    Side side{};
    int start = -1;
    out.cost = g.bottom_top(&side, &start);
    if (out.cost == std::numeric_limits<double>::infinity()) return std::nullopt;
    g.trace_suffix(side, 0, start, choice);
  } else {
    int next = -1;
    out.cost = g.top_edge(*u, &next);
    if (out.cost == std::numeric_limits<double>::infinity()) return std::nullopt;
    if (next >= 0) g.trace_suffix(g.tables().side(u->position + 1, u->second), u->position + 2, next, choice);
  }
  out.choice.assign(choice.begin() + out.first_stop, choice.begin() + last + 1);
  return out;
}

std::optional<LineSolution> solve_two_sided(const LineInstance& inst, SolveCounters* counters) {
  const int n = static_cast<int>(inst.candidates.size());
  if (n == 0) return LineSolution{};
  for (const auto& cs : inst.candidates)
    if (cs.empty()) return std::nullopt;

  TwoSided g(inst);
  const std::vector<SwitchoverRef> omega = enumerate_switchovers(inst);
  const int m = static_cast<int>(omega.size());
  if (counters) counters->switchover_vertices += m + 2;

  // Forward pass over switchovers in position order; -1 is the bottom dummy.
  std::vector<double> dist(m, kInf);
  std::vector<int> pred(m, -2);
  for (int v = 0; v < m; ++v) {
    const auto seg = g.segment(omega[v]);
    const double from_bottom = g.bottom_edge(seg);
    if (from_bottom < kInf) {
      dist[v] = from_bottom;
      pred[v] = -1;
      if (counters) ++counters->switchover_edges;
    }
    for (int u = 0; u < v && omega[u].position < omega[v].position; ++u) {
      if (dist[u] == kInf) continue;
      const double e = g.edge(omega[u], seg);
      if (e == kInf) continue;
      if (counters) ++counters->switchover_edges;
      const double d = dist[u] + e;
      if (d < dist[v]) {
        dist[v] = d;
        pred[v] = u;
      }
    }
  }

  Side bt_side = Side::Left;
  int bt_start = -1;
  double best = g.bottom_top(&bt_side, &bt_start);
  int last = -1;  // -1: the direct bottom-top edge
  for (int u = 0; u < m; ++u) {
    if (dist[u] == kInf) continue;
    const double e = g.top_edge(omega[u]);
    if (e == kInf) continue;
    if (counters) ++counters->switchover_edges;
    if (dist[u] + e < best) {
      best = dist[u] + e;
      last = u;
    }
  }
  if (best == kInf) return std::nullopt;

  std::vector<int> choice(n, -1);
  if (last < 0) {
    g.trace_suffix(bt_side, 0, bt_start, choice);
    return finish(inst, std::move(choice));
  }
  {
    const auto& u = omega[last];
    int next = -1;
    g.top_edge(u, &next);
    if (next >= 0) g.trace_suffix(g.tables().side(u.position + 1, u.second), u.position + 2, next, choice);
  }
  for (int v = last; v >= 0; v = pred[v]) {
    const auto seg = g.segment(omega[v]);
    const int u = pred[v];
    if (u == -1) {
      int start = -1;
      g.bottom_edge(seg, &start);
      g.trace(seg, 0, start, choice);
      break;
    }
    const int entry = omega[u].position + 1;
    if (entry == omega[v].position)
      choice[omega[v].position + 1] = omega[v].second;
    else
      g.trace(seg, entry + 1, seg.dp.next[entry][omega[u].second], choice);
  }
  return finish(inst, std::move(choice));
}

std::optional<PathResult> min_path(int vertex_count, int source, int target, const EdgeGenerator& edges) {
  std::vector<double> dist(vertex_count, kInf);
  std::vector<int> pred(vertex_count, -1);
  dist[source] = 0.0;
  for (int v = source; v < vertex_count; ++v) {
    if (dist[v] == kInf) continue;
    edges(v, [&](int to, double cost) {
      if (to <= v || to >= vertex_count) throw std::invalid_argument("edge against topological order");
      if (dist[v] + cost < dist[to]) {
        dist[to] = dist[v] + cost;
        pred[to] = v;
      }
    });
  }
  if (dist[target] == kInf) return std::nullopt;
  PathResult r;
  r.cost = dist[target];
  for (int v = target; v != -1; v = pred[v]) r.path.push_back(v);
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

}  // namespace metrolabel
