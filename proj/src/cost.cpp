#include "metrolabel/cost.hpp"

#include <cmath>
#include <numbers>

namespace metrolabel {

double w1(const Candidate& c, StyleKind style, const CostWeights& w) {
  if (style == StyleKind::Curved) return w.steepness_factor * c.delta;
  if (c.segment == SegmentKind::Horizontal) return c.shape != Shape::Diagonal ? w.octi_horizontal_mismatch : 0.0;
  if (c.segment == SegmentKind::Vertical || c.segment == SegmentKind::Diagonal)
    return c.shape != Shape::Horizontal ? w.octi_other_mismatch : 0.0;
  return 0.0;
}

double w2(const Candidate& a, const Candidate& b, const CostWeights& w) {
  if (a.xdir != b.xdir) return w.opposite_xdir_penalty;
  if (a.side != b.side) return 0.0;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double d = std::fmod(std::abs(a.alpha - b.alpha), two_pi);
  if (d > std::numbers::pi) d = two_pi - d;
  return d;
}

double w3(const Switchover& first, const Switchover& second, const CostWeights& w) {
  if (first.is_dummy() || second.is_dummy()) return 0.0;
  // stops from the second label of `first` through the first label of
  // `second`, minus one
  const int d = second.position - first.position;
  if (d < 1) throw NotOrdered("switchovers out of order");
  return w.switchover_gap_factor / d;
}

std::vector<Switchover> switchovers_of(std::span<const Candidate* const> labels) {
  std::vector<Switchover> out;
  for (std::size_t i = 0; i + 1 < labels.size(); ++i)
    if (labels[i]->side != labels[i + 1]->side)
      out.push_back({SwitchoverKind::Real, static_cast<int>(i), labels[i]->id, labels[i + 1]->id});
  return out;
}

CostBreakdown line_cost(std::span<const Candidate* const> labels, StyleKind style, const CostWeights& w) {
  CostBreakdown c;
  for (const Candidate* l : labels) c.w1 += w1(*l, style, w);
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) c.w2 += w2(*labels[i], *labels[i + 1], w);
  const auto so = switchovers_of(labels);
  for (std::size_t i = 0; i + 1 < so.size(); ++i) c.w3 += w3(so[i], so[i + 1], w);
  return c;
}

CostBreakdown line_cost(std::span<const Candidate> labels, StyleKind style, const CostWeights& w) {
  std::vector<const Candidate*> ptrs;
  ptrs.reserve(labels.size());
  for (const Candidate& c : labels) ptrs.push_back(&c);
  return line_cost(ptrs, style, w);
}

LineLabeling make_line_labeling(int line, std::vector<Candidate> labels, StyleKind style, const CostWeights& w) {
  LineLabeling l{line, std::move(labels), {}, {}};
  std::vector<const Candidate*> ptrs;
  for (const Candidate& c : l.labels) ptrs.push_back(&c);
  l.cost = line_cost(ptrs, style, w);
  l.switchovers = switchovers_of(ptrs);
  return l;
}

void finalize(Labeling& l, StyleKind style, const CostWeights& w) {
  l.cost = {};
  for (LineLabeling& ll : l.lines) {
    ll = make_line_labeling(ll.line, std::move(ll.labels), style, w);
    l.cost += ll.cost;
  }
}

}  // namespace metrolabel
