// Random instance builders and brute-force references shared by tests.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "metrolabel/cost.hpp"
#include "metrolabel/oracle.hpp"
#include "metrolabel/preselect.hpp"
#include "metrolabel/single_line.hpp"
#include "metrolabel/styles.hpp"

namespace testsupport {

using namespace metrolabel;

inline SimplePolygon rect(double x0, double y0, double x1, double y1) {
  return SimplePolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

inline Candidate rect_candidate(int id, int line, int stop, Side side, double x0, double y0, double x1, double y1,
                                double alpha) {
  Candidate c;
  c.id = id;
  c.line = line;
  c.stop = stop;
  c.stop_id = "s" + std::to_string(line) + "_" + std::to_string(stop);
  c.polygon = rect(x0, y0, x1, y1);
  c.side = side;
  c.alpha = alpha;
  c.delta = steepness_from_angle(alpha);
  c.xdir = std::cos(alpha) < 0 ? -1 : 1;
  c.shape = Shape::Curved;
  c.segment = SegmentKind::Free;
  c.start_point = {x0, 0.5 * (y0 + y1)};
  c.end_point = {x1, 0.5 * (y0 + y1)};
  c.centerline = {c.start_point, c.end_point};
  return c;
}

struct RandomLine {
  MetroMap map;
  LineInstance inst;
  MapCandidates as_map() const { return MapCandidates{inst.candidates}; }
};

// Horizontal line with stops 2 units apart; left labels above, right labels
// below, random widths and offsets so neighbours overlap often. Angles are
// continuous so optimal costs are almost surely unique.
inline RandomLine random_line(std::mt19937_64& rng, int n, int k, bool two_sided, bool enforce = true,
                              double y = 0.0, int line_index = 0, int first_id = 0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  RandomLine r;
  r.map.style = StyleKind::Curved;
  const double spacing = 2.0;
  MetroLine line{"L" + std::to_string(line_index),
                 Polyline({{-5.0, y}, {spacing * (n - 1) + 5.0, y}}),
                 {}};
  r.inst.style = StyleKind::Curved;
  r.inst.candidates.resize(n);
  int id = first_id;
  for (int i = 0; i < n; ++i) {
    const double x = spacing * i;
    line.stops.push_back({"s" + std::to_string(line_index) + "_" + std::to_string(i), "AB", {x, y}, line.id, i});
    for (int j = 0; j < k; ++j) {
      const Side side = (two_sided && U(rng) < 0.5) ? Side::Right : Side::Left;
      const double ox = -2.5 + 3.0 * U(rng);
      const double w = 0.5 + 3.0 * U(rng);
      const double y0 = 0.2 + 0.6 * U(rng);
      const double h = 0.4 + 1.2 * U(rng);
      const double alpha = 2.0 * std::numbers::pi * U(rng);
      if (side == Side::Left)
        r.inst.candidates[i].push_back(
            rect_candidate(id++, line_index, i, side, x + ox, y + y0, x + ox + w, y + y0 + h, alpha));
      else
        r.inst.candidates[i].push_back(
            rect_candidate(id++, line_index, i, side, x + ox, y - y0 - h, x + ox + w, y - y0, alpha));
    }
  }
  r.map.lines.push_back(std::move(line));
  if (enforce) {
    enforce_separation(r.inst.candidates, {}, r.inst.style, r.inst.weights);
    enforce_transitivity(r.inst.candidates, {});
  }
  return r;
}

// Plain enumeration of every assignment of one line; canonical cost.
struct Brute {
  std::optional<double> cost;
  std::vector<int> choice;
};

inline Brute brute_force_line(const LineInstance& inst) {
  const int n = static_cast<int>(inst.candidates.size());
  Brute best;
  std::vector<int> pick(n, 0);
  for (const auto& cs : inst.candidates)
    if (cs.empty()) return best;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      std::vector<const Candidate*> labels;
      for (int j = 0; j < n; ++j) labels.push_back(&inst.candidates[j][pick[j]]);
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (polygons_intersect(labels[a]->polygon, labels[b]->polygon)) return;
      const double c = line_cost(labels, inst.style, inst.weights).total();
      if (!best.cost || c < *best.cost) {
        best.cost = c;
        best.choice = pick;
      }
      return;
    }
    for (int c = 0; c < static_cast<int>(inst.candidates[i].size()); ++c) {
      pick[i] = c;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace testsupport
