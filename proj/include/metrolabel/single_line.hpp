// Optimal labeling of a single line: one-sided shortest path, switchover
// graph for the two-sided case, and a generic DAG shortest path.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "metrolabel/cost.hpp"

namespace metrolabel {

// Candidates of one line, indexed by stop; within a stop sorted by id.
struct LineInstance {
  StyleKind style = StyleKind::Octilinear;
  LineCandidates candidates;
  CostWeights weights;

  std::size_t stop_count() const { return candidates.size(); }
};

// choice[i] indexes candidates[i].
struct LineSolution {
  std::vector<int> choice;
  CostBreakdown cost;
  std::vector<Switchover> switchovers;

  double total() const { return cost.total(); }
};

std::vector<Candidate> materialize(const LineInstance& inst, const LineSolution& s);

struct SolveCounters {
  std::uint64_t relaxations = 0;
  std::uint64_t switchover_vertices = 0;
  std::uint64_t switchover_edges = 0;
};

// Real switchovers as stop positions and candidate indices, sorted by
// position then by candidate ids.
struct SwitchoverRef {
  int position = 0;
  int first = 0;   // index into candidates[position]
  int second = 0;  // index into candidates[position + 1]
};
std::vector<SwitchoverRef> enumerate_switchovers(const LineInstance& inst);
std::vector<Switchover> to_switchovers(const LineInstance& inst, const std::vector<SwitchoverRef>& refs);

// Minimum-cost labeling using only `side` candidates. fixed_head/fixed_tail
// pin the first/last stop to a candidate index.
std::optional<LineSolution> solve_one_sided(const LineInstance& inst, Side side,
                                            std::optional<int> fixed_head = std::nullopt,
                                            std::optional<int> fixed_tail = std::nullopt,
                                            SolveCounters* counters = nullptr);

// Optimal labeling of the stops strictly after `from` up to and including
// `to`, with `to` as its only switchover; `from` may be the bottom dummy and
// `to` the top dummy. Absent when the two are not compatible.
struct SegmentSolution {
  std::vector<int> choice;  // stops from.position + 2 .. end of the segment
  int first_stop = 0;
  double cost = 0.0;  // edge cost in the switchover graph
};
std::optional<SegmentSolution> compatible(const LineInstance& inst, const Switchover& from, const Switchover& to);

std::optional<LineSolution> solve_two_sided(const LineInstance& inst, SolveCounters* counters = nullptr);

// Shortest path over vertices 0..n-1 given in topological order. `edges`
// reports the outgoing edges of a vertex through the callback.
struct PathResult {
  std::vector<int> path;
  double cost = 0.0;
};
using EdgeSink = std::function<void(int to, double cost)>;
using EdgeGenerator = std::function<void(int from, const EdgeSink&)>;
std::optional<PathResult> min_path(int vertex_count, int source, int target, const EdgeGenerator& edges);

}  // namespace metrolabel
