// Exhaustive branch-and-bound labeling over all lines, for small instances.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "metrolabel/cost.hpp"

namespace metrolabel {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  // Upper bound on the product of candidate-set sizes; 0 disables the check.
  std::uint64_t budget = 1'000'000;
  // Return the first valid labeling instead of the cheapest one.
  bool first_feasible = false;
};

struct OracleResult {
  Labeling labeling;
  double cost = 0.0;
  std::uint64_t nodes = 0;
};

// Valid = one label per stop, no two labels intersect, no label intersects a
// line. Ties go to the lexicographically smallest candidate-id sequence
// (lines in order, stops in order).
std::optional<OracleResult> exact_labeling(const MetroMap& map, const MapCandidates& candidates,
                                           const CostWeights& weights, OracleOptions opts = {});

// Validity predicate shared with the pipeline checks.
bool label_hits_any_line(const Candidate& c, const MetroMap& map);
bool labels_conflict(const Candidate& a, const Candidate& b);

}  // namespace metrolabel
