#include "metrolabel/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace metrolabel {

bool labels_conflict(const Candidate& a, const Candidate& b) {
  if (!a.polygon.bbox().overlaps(b.polygon.bbox())) return false;
  return polygons_intersect(a.polygon, b.polygon);
}

bool label_hits_any_line(const Candidate& c, const MetroMap& map) {
  for (const MetroLine& l : map.lines)
    if (l.path.bbox().overlaps(c.polygon.bbox()) && polygon_intersects_polyline(c.polygon, l.path)) return true;
  return false;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Search {
 public:
  Search(const MetroMap& map, const MapCandidates& cands, const CostWeights& w, const OracleOptions& o)
      : map_(map), cands_(cands), w_(w), opts_(o) {
    for (std::size_t li = 0; li < cands.size(); ++li)
      for (std::size_t si = 0; si < cands[li].size(); ++si) {
        Var v{static_cast<int>(li), static_cast<int>(si), {}};
        for (const Candidate& c : cands[li][si]) {
          const int g = static_cast<int>(flat_.size());
          flat_.push_back(&c);
          var_of_.push_back(static_cast<int>(vars_.size()));
          v.domain.push_back(g);
        }
        vars_.push_back(std::move(v));
      }
    const std::size_t n = flat_.size();
    neighbors_.resize(n);
    blocked_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (var_of_[a] != var_of_[b] && labels_conflict(*flat_[a], *flat_[b])) {
          neighbors_[a].push_back(static_cast<int>(b));
          neighbors_[b].push_back(static_cast<int>(a));
        }
    alive_.assign(vars_.size(), 0);
    for (std::size_t a = 0; a < n; ++a) {
      if (label_hits_any_line(*flat_[a], map_))
        blocked_[a] = 1;  // permanent
      else
        ++alive_[var_of_[a]];
    }
    w1_.resize(n);
    for (std::size_t a = 0; a < n; ++a) w1_[a] = w1(*flat_[a], map_.style, w_);
    // cheapest remaining w1 from variable i on
    floor_.assign(vars_.size() + 1, 0.0);
    for (int i = static_cast<int>(vars_.size()) - 1; i >= 0; --i) {
      double m = kInf;
      for (int g : vars_[i].domain) m = std::min(m, w1_[g]);
      floor_[i] = floor_[i + 1] + (m == kInf ? 0.0 : m);
    }
    assigned_.assign(vars_.size(), -1);
    last_switch_.assign(cands.size(), -1);
  }

  std::optional<OracleResult> run() {
    for (int a : alive_)
      if (a == 0) return std::nullopt;
    if (opts_.first_feasible)
      feasible_dfs(0);
    else
      optimize_dfs(0, 0.0);
    if (best_.empty()) return std::nullopt;
    OracleResult r;
    r.labeling = build(best_);
    r.cost = r.labeling.cost.total();
    r.nodes = nodes_;
    return r;
  }

 private:
  struct Var {
    int line, stop;
    std::vector<int> domain;
  };

  // Blocks neighbours of g; returns false when an unassigned variable runs
  // dry. Always fully applied so that unassign() can undo it.
  bool assign(int var, int g) {
    assigned_[var] = g;
    bool ok = true;
    for (int h : neighbors_[g]) {
      if (blocked_[h]++ == 0) {
        const int hv = var_of_[h];
        if (--alive_[hv] == 0 && assigned_[hv] < 0) ok = false;
      }
    }
    return ok;
  }

  void unassign(int var, int g) {
    for (int h : neighbors_[g])
      if (--blocked_[h] == 0) ++alive_[var_of_[h]];
    assigned_[var] = -1;
  }

  double step_cost(int var, int g) {
    const Var& v = vars_[var];
    double c = w1_[g];
    if (v.stop > 0) {
      const Candidate& prev = *flat_[assigned_[var - 1]];
      const Candidate& cur = *flat_[g];
      c += w2(prev, cur, w_);
      if (prev.side != cur.side) {
        const int before = last_switch_[v.line];
        if (before >= 0) c += w_.switchover_gap_factor / ((v.stop - 1) - before);
      }
    }
    return c;
  }

  void optimize_dfs(std::size_t var, double partial) {
    ++nodes_;
    if (var == vars_.size()) {
      std::vector<int> pick(assigned_);
      const double total = build(pick).cost.total();
      if (total < best_cost_) {
        best_cost_ = total;
        best_ = std::move(pick);
      }
      return;
    }
    const Var& v = vars_[var];
    for (int g : v.domain) {
      if (blocked_[g]) continue;
      const double p = partial + step_cost(static_cast<int>(var), g);
      const double bound = p + floor_[var + 1];
      if (best_cost_ < kInf && bound > best_cost_ + 1e-9 * std::max(1.0, std::abs(best_cost_))) continue;
      const int saved = last_switch_[v.line];
      if (v.stop > 0 && flat_[assigned_[var - 1]]->side != flat_[g]->side) last_switch_[v.line] = v.stop - 1;
      if (assign(static_cast<int>(var), g)) optimize_dfs(var + 1, p);
      unassign(static_cast<int>(var), g);
      last_switch_[v.line] = saved;
    }
  }

  bool feasible_dfs(std::size_t depth) {
    ++nodes_;
    if (depth == vars_.size()) {
      best_ = assigned_;
      return true;
    }
    int var = -1;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (assigned_[i] < 0 && (var < 0 || alive_[i] < alive_[var])) var = static_cast<int>(i);
    for (int g : vars_[var].domain) {
      if (blocked_[g]) continue;
      const bool ok = assign(var, g);
      if (ok && feasible_dfs(depth + 1)) return true;
      unassign(var, g);
    }
    return false;
  }

  Labeling build(const std::vector<int>& pick) const {
    Labeling l;
    l.lines.resize(cands_.size());
    for (std::size_t li = 0; li < cands_.size(); ++li) l.lines[li].line = static_cast<int>(li);
    for (std::size_t i = 0; i < vars_.size(); ++i) l.lines[vars_[i].line].labels.push_back(*flat_[pick[i]]);
    finalize(l, map_.style, w_);
    return l;
  }

  const MetroMap& map_;
  const MapCandidates& cands_;
  const CostWeights& w_;
  OracleOptions opts_;
  std::vector<const Candidate*> flat_;
  std::vector<int> var_of_;
  std::vector<Var> vars_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<int> blocked_;
  std::vector<int> alive_;
  std::vector<double> w1_;
  std::vector<double> floor_;
  std::vector<int> assigned_;
  std::vector<int> last_switch_;
  std::vector<int> best_;
  double best_cost_ = kInf;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::optional<OracleResult> exact_labeling(const MetroMap& map, const MapCandidates& candidates,
                                           const CostWeights& weights, OracleOptions opts) {
  if (opts.budget > 0) {
    double product = 1.0;
    for (const auto& line : candidates)
      for (const auto& stop : line) product *= static_cast<double>(std::max<std::size_t>(stop.size(), 1));
    if (product > static_cast<double>(opts.budget))
      throw BudgetExceeded("candidate product exceeds the oracle budget");
  }
  // lines whose labels never meet are searched separately
  const std::size_t lines = candidates.size();
  std::vector<std::size_t> root(lines);
  for (std::size_t i = 0; i < lines; ++i) root[i] = i;
  auto find = [&](std::size_t i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  std::vector<BBox> extent(lines);
  std::vector<bool> any(lines, false);
  for (std::size_t li = 0; li < lines; ++li)
    for (const auto& stop : candidates[li])
      for (const Candidate& c : stop) {
        extent[li] = any[li] ? extent[li].merged(c.polygon.bbox()) : c.polygon.bbox();
        any[li] = true;
      }
  for (std::size_t a = 0; a < lines; ++a)
    for (std::size_t b = a + 1; b < lines; ++b) {
      if (!any[a] || !any[b] || !extent[a].overlaps(extent[b]) || find(a) == find(b)) continue;
      bool meet = false;
      for (const auto& sa : candidates[a])
        for (const Candidate& ca : sa) {
          for (const auto& sb : candidates[b]) {
            for (const Candidate& cb : sb)
              if (labels_conflict(ca, cb)) {
                meet = true;
                break;
              }
            if (meet) break;
          }
          if (meet) break;
        }
      if (meet) root[find(a)] = find(b);
    }

  Labeling merged;
  merged.lines.resize(lines);
  std::uint64_t nodes = 0;
  for (std::size_t r = 0; r < lines; ++r) {
    if (find(r) != r) continue;
    MapCandidates part(lines);
    for (std::size_t li = 0; li < lines; ++li)
      if (find(li) == r) part[li] = candidates[li];
    Search s(map, part, weights, opts);
    auto got = s.run();
    if (!got) return std::nullopt;
    nodes += got->nodes;
    for (std::size_t li = 0; li < lines; ++li)
      if (find(li) == r) merged.lines[li] = std::move(got->labeling.lines[li]);
  }
  finalize(merged, map.style, weights);
  OracleResult out;
  out.cost = merged.cost.total();
  out.labeling = std::move(merged);
  out.nodes = nodes;
  return out;
}

}  // namespace metrolabel
