// Label, pair and switchover costs, and the canonical per-line total.
#pragma once

#include <span>
#include <vector>

#include "metrolabel/styles.hpp"

namespace metrolabel {

struct CostWeights {
  double steepness_factor = 10.0;
  double opposite_xdir_penalty = 150.0;
  double switchover_gap_factor = 200.0;
  double octi_horizontal_mismatch = 200.0;
  double octi_other_mismatch = 100.0;
};

class NotOrdered : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class SwitchoverKind { Real, Bottom, Top };

// A side change between the labels of stops `position` and `position + 1`.
// Candidate ids are -1 for the dummies.
struct Switchover {
  SwitchoverKind kind = SwitchoverKind::Real;
  int position = 0;
  int first_id = -1;
  int second_id = -1;

  static Switchover bottom() { return {SwitchoverKind::Bottom, -2, -1, -1}; }
  static Switchover top(int stops) { return {SwitchoverKind::Top, stops, -1, -1}; }
  bool is_dummy() const { return kind != SwitchoverKind::Real; }
};

double w1(const Candidate& c, StyleKind style, const CostWeights& w);
// a and b label consecutive stops, a first.
double w2(const Candidate& a, const Candidate& b, const CostWeights& w);
double w3(const Switchover& first, const Switchover& second, const CostWeights& w);

struct CostBreakdown {
  double w1 = 0.0;
  double w2 = 0.0;
  double w3 = 0.0;
  double total() const { return (w1 + w2) + w3; }
  CostBreakdown& operator+=(const CostBreakdown& o) {
    w1 += o.w1;
    w2 += o.w2;
    w3 += o.w3;
    return *this;
  }
};

// Real switchovers of a labeling given in stop order.
std::vector<Switchover> switchovers_of(std::span<const Candidate* const> labels);

// Each of the three sums accumulated left to right by stop.
CostBreakdown line_cost(std::span<const Candidate* const> labels, StyleKind style, const CostWeights& w);
CostBreakdown line_cost(std::span<const Candidate> labels, StyleKind style, const CostWeights& w);

// One selected candidate per stop of one line.
struct LineLabeling {
  int line = 0;
  std::vector<Candidate> labels;  // indexed by stop
  CostBreakdown cost;
  std::vector<Switchover> switchovers;
};

struct Labeling {
  std::vector<LineLabeling> lines;  // indexed by line
  CostBreakdown cost;               // sum over lines, in line order
};

// Fills cost and switchovers of every line and the total.
void finalize(Labeling& l, StyleKind style, const CostWeights& w);
LineLabeling make_line_labeling(int line, std::vector<Candidate> labels, StyleKind style, const CostWeights& w);

}  // namespace metrolabel
