// Existence check for a labeling from one left and one right candidate per
// stop (2SAT), and the shrink-factor search built on it.
#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "metrolabel/cost.hpp"

namespace metrolabel {

class MissingSide : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RepresentativePair {
  std::string stop_id;
  int line = 0;
  int stop = 0;
  Candidate left;
  Candidate right;
};

// Per stop and side the cheapest candidate clear of every line, or the
// cheapest of that side when all of them hit a line.
std::vector<RepresentativePair> choose_representatives(const MetroMap& map, const MapCandidates& cands,
                                                       const CostWeights& w);

// Boolean formula in conjunctive normal form with at most two literals per
// clause. Literal 2v is "v true", 2v+1 is "v false".
class TwoSat {
 public:
  explicit TwoSat(int variables) : n_(variables), graph_(2 * static_cast<std::size_t>(variables)) {}
  static int pos(int v) { return 2 * v; }
  static int neg(int v) { return 2 * v + 1; }

  void add_clause(int a, int b);
  void add_unit(int a) { add_clause(a, a); }
  std::optional<std::vector<bool>> solve() const;
  int variables() const { return n_; }

 private:
  int n_;
  std::vector<std::vector<int>> graph_;  // implication edges
};

std::optional<Labeling> two_sat_feasible(const std::vector<RepresentativePair>& pairs, const MetroMap& map,
                                         const CostWeights& w);

struct ScaleSearchConfig {
  double x_min = 0.2;
  double x_max = 1.0;
  int steps = 20;
};

// Geometric sequence from x_max down to x_min.
std::vector<double> scale_samples(const ScaleSearchConfig& cfg);

struct ScaleFound {
  MapCandidates candidates;
  double scale = 1.0;
  Labeling initial;
};

struct ScaleSearchResult {
  std::optional<ScaleFound> found;
  std::vector<double> attempted;
};

ScaleSearchResult scale_search(const MetroMap& map, const ScaleSearchConfig& cfg, const CostWeights& w,
                               int samples_per_side = 24);

}  // namespace metrolabel
