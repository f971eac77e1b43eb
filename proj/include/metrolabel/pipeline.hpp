// Full labeling workflow (candidates, scale search, pre-selection, per-line
// solve) and the greedy baseline sharing its first three steps.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metrolabel/feasibility.hpp"
#include "metrolabel/preselect.hpp"
#include "metrolabel/single_line.hpp"

namespace metrolabel {

struct SequenceStats {
  int min = 0;
  int max = 0;
  double avg = 0.0;
  int runs = 0;
};

// Maximal runs of same-side labels per line, aggregated over all runs.
SequenceStats sequence_stats(const Labeling& l);

struct StepTimings {
  double generate_ms = 0.0;
  double scale_ms = 0.0;
  double preselect_ms = 0.0;
  double solve_ms = 0.0;
};

struct LineStats {
  std::string id;
  CostBreakdown cost;
  int switchovers = 0;
};

struct RunStats {
  std::string algorithm;
  bool success = false;
  std::string failure;
  double scale = 0.0;
  double scale_ratio = 0.0;  // scale / x_max
  std::vector<double> attempted_scales;
  StepTimings timings;
  std::size_t candidates_step1 = 0;
  std::size_t candidates_step3 = 0;
  int removed_separation = 0;
  int removed_transitivity = 0;
  int removed_line_hits = 0;
  int removed_conflicts = 0;
  int ranking_fallbacks = 0;  // lines whose ranking DP found no labeling
  int solve_fallbacks = 0;    // lines that kept the initial labeling
  std::vector<LineStats> lines;
  CostBreakdown cost;
  int switchovers = 0;
  SequenceStats sequences;
};

struct PipelineConfig {
  ScaleSearchConfig scale;
  CostWeights weights;
  int samples_per_side = 24;
  int threads = 0;  // 0: METROLABEL_THREADS or hardware concurrency
};

// Result of steps 1-3, shared by both algorithms.
struct Prepared {
  MapCandidates candidates;
  Labeling initial;
  RunStats stats;
};

// Absent when no sampled scale admits a labeling; `stats` then records the
// attempt.
std::optional<Prepared> prepare(const MetroMap& map, const PipelineConfig& cfg, RunStats& stats);

struct RunResult {
  std::optional<Labeling> labeling;
  RunStats stats;
};

RunResult dyn_alg(const MetroMap& map, const PipelineConfig& cfg);
RunResult greedy_alg(const MetroMap& map, const PipelineConfig& cfg);
// Exact global optimum over the post-pre-selection candidates. Throws
// BudgetExceeded for instances beyond `budget` assignments.
RunResult oracle_alg(const MetroMap& map, const PipelineConfig& cfg, std::uint64_t budget);

// Step 4 of each algorithm on already prepared candidates.
Labeling solve_lines(const MetroMap& map, const MapCandidates& cands, const Labeling& initial,
                     const PipelineConfig& cfg, int* fallbacks = nullptr);
Labeling greedy_refine(const MetroMap& map, const MapCandidates& cands, const Labeling& initial,
                       const CostWeights& w);

// One label per stop, no label-label and no label-line intersections.
bool is_valid_labeling(const MetroMap& map, const Labeling& l, std::string* why = nullptr);

void fill_result_stats(RunStats& stats, const MetroMap& map, const Labeling& l);

int thread_count(int requested);

}  // namespace metrolabel
