#include "metrolabel/preselect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>
#include <unordered_map>

#include "metrolabel/oracle.hpp"

namespace metrolabel {

namespace {

struct Flat {
  int stop;
  const Candidate* c;
};

std::vector<Flat> flatten(const LineCandidates& line) {
  std::vector<Flat> out;
  for (std::size_t s = 0; s < line.size(); ++s)
    for (const Candidate& c : line[s]) out.push_back({static_cast<int>(s), &c});
  return out;
}

// Sorted adjacency over a flattened line.
std::vector<std::vector<int>> adjacency(const std::vector<Flat>& f) {
  std::vector<std::vector<int>> adj(f.size());
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = a + 1; b < f.size(); ++b)
      if (labels_conflict(*f[a].c, *f[b].c)) {
        adj[a].push_back(static_cast<int>(b));
        adj[b].push_back(static_cast<int>(a));
      }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  return adj;
}

bool hit(const std::vector<std::vector<int>>& adj, int a, int b) {
  return std::binary_search(adj[a].begin(), adj[a].end(), b);
}

void compact(LineCandidates& line, const std::vector<Flat>& f, const std::vector<char>& dead) {
  std::unordered_set<const Candidate*> gone;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (dead[i]) gone.insert(f[i].c);
  LineCandidates out(line.size());
  for (std::size_t s = 0; s < line.size(); ++s)
    for (Candidate& c : line[s])
      if (!gone.count(&c)) out[s].push_back(std::move(c));
  line = std::move(out);
}

}  // namespace

ProtectedIds ids_of(const Labeling& l) {
  ProtectedIds ids;
  for (const auto& line : l.lines)
    for (const auto& c : line.labels) ids.insert(c.id);
  return ids;
}

int enforce_separation(LineCandidates& line, const ProtectedIds& keep, StyleKind style, const CostWeights& w) {
  const auto f = flatten(line);
  std::vector<char> dead(f.size(), 0);
  int removed = 0;
  for (std::size_t a = 0; a < f.size(); ++a) {
    for (std::size_t b = a + 1; b < f.size() && !dead[a]; ++b) {
      if (dead[b] || f[a].c->side == f[b].c->side) continue;
      if (!labels_conflict(*f[a].c, *f[b].c)) continue;
      const bool ka = keep.count(f[a].c->id) > 0, kb = keep.count(f[b].c->id) > 0;
      std::size_t victim;
      if (ka && !kb) {
        victim = b;
      } else if (kb && !ka) {
        victim = a;
      } else {
        const double wa = w1(*f[a].c, style, w), wb = w1(*f[b].c, style, w);
        if (wa != wb)
          victim = wa > wb ? a : b;
        else
          victim = f[a].c->id > f[b].c->id ? a : b;
      }
      dead[victim] = 1;
      ++removed;
    }
  }
  if (removed) compact(line, f, dead);
  return removed;
}

int enforce_transitivity(LineCandidates& line, const ProtectedIds& keep) {
  const auto f = flatten(line);
  const auto adj = adjacency(f);
  std::vector<char> dead(f.size(), 0);
  const int n = static_cast<int>(line.size());
  std::vector<std::vector<int>> at(n);
  for (std::size_t i = 0; i < f.size(); ++i) at[f[i].stop].push_back(static_cast<int>(i));

  // Some candidate strictly between the two stops, on the given side,
  // misses both labels.
  auto witness = [&](int a, int b, int lo, int hi, Side side) {
    for (int s = lo + 1; s < hi; ++s)
      for (int m : at[s])
        if (!dead[m] && f[m].c->side == side && !hit(adj, m, a) && !hit(adj, m, b)) return true;
    return false;
  };

  int removed = 0;
  for (int s = 0; s < n; ++s) {
    bool restart = true;
    while (restart) {
      restart = false;
      for (int l : at[s]) {
        if (dead[l]) continue;
        for (int s2 = s - 2; s2 >= 0 && !restart; --s2) {
          for (int l2 : at[s2]) {
            if (dead[l2] || f[l2].c->side != f[l].c->side || !hit(adj, l, l2)) continue;
            if (!witness(l, l2, s2, s, f[l].c->side)) continue;
            const int victim = keep.count(f[l].c->id) ? l2 : l;
            dead[victim] = 1;
            ++removed;
            restart = true;
            break;
          }
        }
        if (restart) break;
      }
    }
  }
  if (removed) compact(line, f, dead);
  return removed;
}

bool satisfies_separation(const LineCandidates& line) {
  const auto f = flatten(line);
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = a + 1; b < f.size(); ++b)
      if (f[a].c->side != f[b].c->side && labels_conflict(*f[a].c, *f[b].c)) return false;
  return true;
}

bool satisfies_transitivity(const LineCandidates& line, std::size_t max_triples) {
  const auto f = flatten(line);
  const auto adj = adjacency(f);
  std::size_t seen = 0;
  for (std::size_t a = 0; a < f.size(); ++a)
    for (int c : adj[a]) {
      // only intersecting outer pairs can violate
      if (f[c].stop <= f[a].stop + 1 || f[c].c->side != f[a].c->side) continue;
      for (std::size_t b = 0; b < f.size(); ++b) {
        if (f[b].stop <= f[a].stop || f[b].stop >= f[c].stop || f[b].c->side != f[a].c->side) continue;
        if (max_triples && ++seen > max_triples) return true;
        if (!hit(adj, static_cast<int>(a), static_cast<int>(b)) && !hit(adj, static_cast<int>(b), c)) return false;
      }
    }
  return true;
}

std::vector<int> rank_candidates(const MapCandidates& cands, const std::vector<std::optional<LineSolution>>& per_line,
                                 StyleKind style, const CostWeights& w) {
  struct Key {
    int val;
    double w1;
    int id;
  };
  std::vector<Key> keys;
  for (std::size_t li = 0; li < cands.size(); ++li)
    for (std::size_t si = 0; si < cands[li].size(); ++si) {
      int chosen = -1;
      if (li < per_line.size() && per_line[li] && si < per_line[li]->choice.size())
        chosen = per_line[li]->choice[si];
      for (std::size_t ci = 0; ci < cands[li][si].size(); ++ci) {
        const Candidate& c = cands[li][si][ci];
        keys.push_back({static_cast<int>(ci) == chosen ? 1 : 0, w1(c, style, w), c.id});
      }
    }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    return std::tie(b.val, a.w1, a.id) < std::tie(a.val, b.w1, b.id);
  });
  std::vector<int> out;
  out.reserve(keys.size());
  for (const Key& k : keys) out.push_back(k.id);
  return out;
}

std::vector<std::pair<int, int>> inter_line_conflicts(const MapCandidates& cands) {
  std::vector<const Candidate*> all;
  for (const auto& line : cands)
    for (const auto& stop : line)
      for (const auto& c : stop) all.push_back(&c);
  if (all.empty()) return {};

  double cell = 0.0;
  for (const Candidate* c : all) {
    const BBox& b = c->polygon.bbox();
    cell = std::max({cell, b.max_x - b.min_x, b.max_y - b.min_y});
  }
  cell = std::max(cell, 1e-6);
  const double eps = kEps;

  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  auto key = [](std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint64_t>(y & 0xffffffff);
  };
  for (std::size_t i = 0; i < all.size(); ++i) {
    const BBox& b = all[i]->polygon.bbox();
    const auto x0 = static_cast<std::int64_t>(std::floor((b.min_x - eps) / cell));
    const auto x1 = static_cast<std::int64_t>(std::floor((b.max_x + eps) / cell));
    const auto y0 = static_cast<std::int64_t>(std::floor((b.min_y - eps) / cell));
    const auto y1 = static_cast<std::int64_t>(std::floor((b.max_y + eps) / cell));
    for (auto x = x0; x <= x1; ++x)
      for (auto y = y0; y <= y1; ++y) grid[key(x, y)].push_back(static_cast<int>(i));
  }
  std::vector<std::pair<int, int>> candidates_pairs;
  for (const auto& [k, members] : grid)
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const Candidate* p = all[members[a]];
        const Candidate* q = all[members[b]];
        if (p->line == q->line) continue;
        candidates_pairs.emplace_back(std::min(members[a], members[b]), std::max(members[a], members[b]));
      }
  std::sort(candidates_pairs.begin(), candidates_pairs.end());
  candidates_pairs.erase(std::unique(candidates_pairs.begin(), candidates_pairs.end()), candidates_pairs.end());

  std::vector<std::pair<int, int>> out;
  for (const auto& [a, b] : candidates_pairs)
    if (labels_conflict(*all[a], *all[b]))
      out.emplace_back(std::min(all[a]->id, all[b]->id), std::max(all[a]->id, all[b]->id));
  std::sort(out.begin(), out.end());
  return out;
}

IndependenceReport make_independent(MapCandidates& cands, const MetroMap& map, const ProtectedIds& keep,
                                    const std::vector<int>& rank) {
  IndependenceReport rep;
  for (auto& line : cands)
    for (auto& stop : line) {
      const auto before = stop.size();
      std::erase_if(stop, [&](const Candidate& c) { return !keep.count(c.id) && label_hits_any_line(c, map); });
      rep.removed_line_hits += static_cast<int>(before - stop.size());
    }

  std::unordered_map<int, std::vector<int>> adj;
  for (const auto& [a, b] : inter_line_conflicts(cands)) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::unordered_set<int> chosen, removed;
  auto take = [&](int id) {
    chosen.insert(id);
    if (auto it = adj.find(id); it != adj.end())
      for (int nb : it->second) removed.insert(nb);
  };
  std::vector<int> seeds(keep.begin(), keep.end());
  std::sort(seeds.begin(), seeds.end());
  for (int id : seeds) take(id);
  for (int id : rank)
    if (!chosen.count(id) && !removed.count(id)) take(id);

  for (auto& line : cands)
    for (auto& stop : line) {
      const auto before = stop.size();
      std::erase_if(stop, [&](const Candidate& c) { return !chosen.count(c.id); });
      rep.removed_conflicts += static_cast<int>(before - stop.size());
    }
  return rep;
}

}  // namespace metrolabel
