#include "metrolabel/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metrolabel/oracle.hpp"

namespace metrolabel {

std::vector<RepresentativePair> choose_representatives(const MetroMap& map, const MapCandidates& cands,
                                                       const CostWeights& w) {
  std::vector<RepresentativePair> out;
  for (std::size_t li = 0; li < cands.size(); ++li)
    for (std::size_t si = 0; si < cands[li].size(); ++si) {
      const StopCandidates& cs = cands[li][si];
      const Candidate* best[2][2] = {{nullptr, nullptr}, {nullptr, nullptr}};  // [side][clear]
      double cost[2][2];
      for (const Candidate& c : cs) {
        const int side = static_cast<int>(c.side);
        const int clear = label_hits_any_line(c, map) ? 0 : 1;
        const double v = w1(c, map.style, w);
        for (int slot : {0, clear}) {
          if (slot == 1 && !clear) continue;
          if (!best[side][slot] || v < cost[side][slot]) {
            best[side][slot] = &c;
            cost[side][slot] = v;
          }
        }
      }
      const std::string& stop_id = map.lines[li].stops[si].id;
      auto pick = [&](Side s) -> const Candidate& {
        const int k = static_cast<int>(s);
        if (best[k][1]) return *best[k][1];
        if (best[k][0]) return *best[k][0];
        throw MissingSide("stop " + stop_id + " has no " + to_string(s) + " candidate");
      };
      out.push_back({stop_id, static_cast<int>(li), static_cast<int>(si), pick(Side::Left), pick(Side::Right)});
    }
  return out;
}

void TwoSat::add_clause(int a, int b) {
  // (a or b)  ==  (!a -> b) and (!b -> a)
  graph_[a ^ 1].push_back(b);
  graph_[b ^ 1].push_back(a);
}

std::optional<std::vector<bool>> TwoSat::solve() const {
  const int m = static_cast<int>(graph_.size());
  std::vector<int> index(m, -1), low(m, 0), comp(m, -1), stack;
  std::vector<char> on_stack(m, 0);
  int counter = 0, components = 0;
  // iterative Tarjan: frames of (vertex, next edge)
  std::vector<std::pair<int, std::size_t>> frames;
  for (int root = 0; root < m; ++root) {
    if (index[root] >= 0) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, e] = frames.back();
      if (e < graph_[v].size()) {
        const int to = graph_[v][e++];
        if (index[to] < 0) {
          index[to] = low[to] = counter++;
          stack.push_back(to);
          on_stack[to] = 1;
          frames.push_back({to, 0});
        } else if (on_stack[to]) {
          low[v] = std::min(low[v], index[to]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = components;
        } while (w != v);
        ++components;
      }
      const int done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
    }
  }
  std::vector<bool> value(n_);
  for (int v = 0; v < n_; ++v) {
    if (comp[pos(v)] == comp[neg(v)]) return std::nullopt;
    // components are numbered in reverse topological order
    value[v] = comp[pos(v)] < comp[neg(v)];
  }
  return value;
}

std::optional<Labeling> two_sat_feasible(const std::vector<RepresentativePair>& pairs, const MetroMap& map,
                                         const CostWeights& w) {
  const int n = static_cast<int>(pairs.size());
  // variable 2i: left of pair i, 2i+1: right of pair i
  auto cand = [&](int v) -> const Candidate& { return v % 2 == 0 ? pairs[v / 2].left : pairs[v / 2].right; };
  TwoSat sat(2 * n);
  for (int i = 0; i < n; ++i) {
    sat.add_clause(TwoSat::pos(2 * i), TwoSat::pos(2 * i + 1));
    sat.add_clause(TwoSat::neg(2 * i), TwoSat::neg(2 * i + 1));
  }
  for (int v = 0; v < 2 * n; ++v)
    if (label_hits_any_line(cand(v), map)) sat.add_unit(TwoSat::neg(v));
  for (int a = 0; a < 2 * n; ++a)
    for (int b = a + 1; b < 2 * n; ++b) {
      if (a / 2 == b / 2) continue;
      if (labels_conflict(cand(a), cand(b))) sat.add_clause(TwoSat::neg(a), TwoSat::neg(b));
    }
  const auto value = sat.solve();
  if (!value) return std::nullopt;

  Labeling l;
  l.lines.resize(map.lines.size());
  for (std::size_t li = 0; li < map.lines.size(); ++li) {
    l.lines[li].line = static_cast<int>(li);
    l.lines[li].labels.resize(map.lines[li].stops.size());
  }
  for (int i = 0; i < n; ++i)
    l.lines[pairs[i].line].labels[pairs[i].stop] = (*value)[2 * i] ? pairs[i].left : pairs[i].right;
  finalize(l, map.style, w);
  return l;
}

std::vector<double> scale_samples(const ScaleSearchConfig& cfg) {
  if (!(cfg.x_min > 0 && cfg.x_min <= cfg.x_max && cfg.x_max <= 1.0) || cfg.steps < 1)
    throw std::invalid_argument("scale range must satisfy 0 < x_min <= x_max <= 1 and steps >= 1");
  std::vector<double> out;
  if (cfg.steps == 1) return {cfg.x_max};
  const double ratio = cfg.x_min / cfg.x_max;
  for (int i = 0; i < cfg.steps; ++i) {
    if (i == cfg.steps - 1)
      out.push_back(cfg.x_min);
    else
      out.push_back(cfg.x_max * std::pow(ratio, static_cast<double>(i) / (cfg.steps - 1)));
  }
  return out;
}

ScaleSearchResult scale_search(const MetroMap& map, const ScaleSearchConfig& cfg, const CostWeights& w,
                               int samples_per_side) {
  ScaleSearchResult r;
  for (double x : scale_samples(cfg)) {
    r.attempted.push_back(x);
    StyleParams p = params_for(map, x);
    p.samples_per_side = samples_per_side;
    MapCandidates cands = generate_candidates(map, p);
    const auto pairs = choose_representatives(map, cands, w);
    auto l = two_sat_feasible(pairs, map, w);
    if (l) {
      r.found = ScaleFound{std::move(cands), x, std::move(*l)};
      return r;
    }
  }
  return r;
}

}  // namespace metrolabel
