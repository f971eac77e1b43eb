// Candidate pruning before the per-line solve: side separation,
// transitivity, and a greedy independent set across lines.
#pragma once

#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "metrolabel/single_line.hpp"

namespace metrolabel {

using ProtectedIds = std::unordered_set<int>;

// Candidate ids of a labeling.
ProtectedIds ids_of(const Labeling& l);

// Returns the number of deleted candidates.
int enforce_separation(LineCandidates& line, const ProtectedIds& keep, StyleKind style, const CostWeights& w);
int enforce_transitivity(LineCandidates& line, const ProtectedIds& keep);

// Exhaustive validators. max_triples caps the transitivity scan; 0 means all.
bool satisfies_separation(const LineCandidates& line);
bool satisfies_transitivity(const LineCandidates& line, std::size_t max_triples = 0);

// Candidate ids in rank order: in a per-line optimal labeling first, then by
// w1, then by id. `per_line` entries may be absent (no ranking boost).
std::vector<int> rank_candidates(const MapCandidates& cands, const std::vector<std::optional<LineSolution>>& per_line,
                                 StyleKind style, const CostWeights& w);

// Intersecting candidate pairs of different lines, as (id, id) with the
// smaller id first, sorted. Found through a uniform grid.
std::vector<std::pair<int, int>> inter_line_conflicts(const MapCandidates& cands);

struct IndependenceReport {
  int removed_line_hits = 0;
  int removed_conflicts = 0;
};

// Drops candidates hitting a line, then keeps a greedy independent set of
// the inter-line conflict graph seeded with `keep`.
IndependenceReport make_independent(MapCandidates& cands, const MetroMap& map, const ProtectedIds& keep,
                                    const std::vector<int>& rank);

}  // namespace metrolabel
