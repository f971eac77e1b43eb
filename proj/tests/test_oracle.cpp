#include <doctest.h>

#include <functional>
#include <random>

#include "metrolabel/oracle.hpp"
#include "support.hpp"

using namespace metrolabel;
using testsupport::rect_candidate;

namespace {

MetroMap single_stop_map() {
  MetroMap m;
  m.style = StyleKind::Curved;
  MetroLine l{"A", Polyline({{-5, 0}, {5, 0}}), {}};
  l.stops.push_back({"s0_0", "Stop", {0, 0}, "A", 0});
  m.lines.push_back(std::move(l));
  return m;
}

// Two random lines close enough that their labels collide.
struct TwoLines {
  MetroMap map;
  MapCandidates cands;
};

TwoLines two_lines(std::mt19937_64& rng, int n, int k) {
  auto a = testsupport::random_line(rng, n, k, true, true, 0.0, 0, 0);
  auto b = testsupport::random_line(rng, n, k, true, true, 3.0, 1, 1000);
  TwoLines t;
  t.map.style = StyleKind::Curved;
  t.map.lines = {a.map.lines[0], b.map.lines[0]};
  t.cands = {a.inst.candidates, b.inst.candidates};
  return t;
}

std::optional<double> enumerate_all(const MetroMap& map, const MapCandidates& cands, const CostWeights& w) {
  std::vector<const StopCandidates*> stops;
  std::vector<int> line_of;
  for (std::size_t li = 0; li < cands.size(); ++li)
    for (const auto& s : cands[li]) {
      stops.push_back(&s);
      line_of.push_back(static_cast<int>(li));
    }
  std::vector<const Candidate*> pick(stops.size());
  std::optional<double> best;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == stops.size()) {
      for (std::size_t a = 0; a < pick.size(); ++a) {
        if (label_hits_any_line(*pick[a], map)) return;
        for (std::size_t b = a + 1; b < pick.size(); ++b)
          if (polygons_intersect(pick[a]->polygon, pick[b]->polygon)) return;
      }
      CostBreakdown c;
      std::size_t at = 0;
      for (std::size_t li = 0; li < cands.size(); ++li) {
        std::vector<const Candidate*> line(pick.begin() + static_cast<long>(at),
                                           pick.begin() + static_cast<long>(at + cands[li].size()));
        at += cands[li].size();
        c += line_cost(line, map.style, w);
      }
      if (!best || c.total() < *best) best = c.total();
      return;
    }
    for (const auto& c : *stops[i]) {
      pick[i] = &c;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace

TEST_CASE("oracle picks the cheaper label of a single stop") {
  const auto m = single_stop_map();
  MapCandidates c{{{rect_candidate(0, 0, 0, Side::Left, -0.5, 1, 0.5, 2, 0.4),
                    rect_candidate(1, 0, 0, Side::Left, -0.5, 1, 0.5, 2, 0.1)}}};
  const auto r = exact_labeling(m, c, {});
  REQUIRE(r);
  CHECK(r->cost == doctest::Approx(1.0));
  CHECK(r->labeling.lines[0].labels[0].id == 1);
}

TEST_CASE("oracle reports no labeling when every candidate crosses a line") {
  const auto m = single_stop_map();
  MapCandidates c{{{rect_candidate(0, 0, 0, Side::Left, -0.5, -1, 0.5, 2, 0.4),
                    rect_candidate(1, 0, 0, Side::Left, 1, -0.5, 2, 0.5, 0.1)}}};
  CHECK_FALSE(exact_labeling(m, c, {}));
}

TEST_CASE("oracle budget") {
  std::mt19937_64 rng(1);
  auto r = testsupport::random_line(rng, 12, 4, true, false);
  MapCandidates c{r.inst.candidates};
  CHECK_THROWS_AS(exact_labeling(r.map, c, r.inst.weights, {1000, false}), BudgetExceeded);
  CHECK_NOTHROW(exact_labeling(r.map, c, r.inst.weights, {0, true}));
}

TEST_CASE("oracle matches plain enumeration") {
  std::mt19937_64 rng(77);
  int found = 0;
  for (int t = 0; t < 60; ++t) {
    const auto tl = two_lines(rng, 1 + static_cast<int>(rng() % 3), 3);
    const CostWeights w;
    const auto ref = enumerate_all(tl.map, tl.cands, w);
    const auto got = exact_labeling(tl.map, tl.cands, w);
    REQUIRE(got.has_value() == ref.has_value());
    if (!got) continue;
    ++found;
    CHECK(got->cost == *ref);
    CHECK(got->labeling.cost.total() == got->cost);
    // first feasible mode agrees on existence
    CHECK(exact_labeling(tl.map, tl.cands, w, {0, true}).has_value());
  }
  CHECK(found > 10);
}

TEST_CASE("oracle matches the line solver") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 60; ++t) {
    auto r = testsupport::random_line(rng, 5, 3, true);
    const auto dp = solve_two_sided(r.inst);
    const auto ex = exact_labeling(r.map, MapCandidates{r.inst.candidates}, r.inst.weights);
    REQUIRE(dp.has_value() == ex.has_value());
    if (dp) CHECK(dp->total() == ex->cost);
  }
}
