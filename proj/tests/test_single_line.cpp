#include <doctest.h>

#include <map>

#include "support.hpp"

using namespace metrolabel;
using namespace testsupport;

namespace {

LineInstance tiny(std::vector<std::vector<Candidate>> per_stop) {
  LineInstance inst;
  inst.style = StyleKind::Curved;
  inst.candidates = std::move(per_stop);
  return inst;
}

// alpha picked so that 10*delta equals `w1`
double alpha_for_w1(double w1v) { return w1v / 10.0; }

}  // namespace

TEST_CASE("one-sided: single stop picks the cheaper label") {
  auto inst = tiny({{rect_candidate(0, 0, 0, Side::Left, 0, 1, 1, 2, alpha_for_w1(3)),
                     rect_candidate(1, 0, 0, Side::Left, 0, 1, 1, 2, alpha_for_w1(7))}});
  auto s = solve_one_sided(inst, Side::Left);
  REQUIRE(s);
  CHECK(s->choice == std::vector<int>{0});
  CHECK(s->total() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("one-sided: mutually intersecting consecutive stops have no labeling") {
  auto inst = tiny({{rect_candidate(0, 0, 0, Side::Left, 0, 1, 2, 2, 0.0)},
                    {rect_candidate(1, 0, 1, Side::Left, 1, 1, 3, 2, 0.0)}});
  CHECK_FALSE(solve_one_sided(inst, Side::Left));
}

TEST_CASE("one-sided: fixed head and tail are honoured") {
  auto inst = tiny({{rect_candidate(0, 0, 0, Side::Left, 0, 1, 1, 2, 0.0),
                     rect_candidate(1, 0, 0, Side::Left, 0, 3, 1, 4, 0.5)},
                    {rect_candidate(2, 0, 1, Side::Left, 2, 1, 3, 2, 0.0),
                     rect_candidate(3, 0, 1, Side::Left, 2, 3, 3, 4, 0.5)}});
  auto free = solve_one_sided(inst, Side::Left);
  REQUIRE(free);
  CHECK(free->choice == std::vector<int>{0, 0});
  auto pinned = solve_one_sided(inst, Side::Left, 1, 1);
  REQUIRE(pinned);
  CHECK(pinned->choice == std::vector<int>{1, 1});
}

TEST_CASE("one-sided matches brute force and the relaxation bound") {
  std::mt19937_64 rng(7);
  int feasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 1 + trial % 6, k = 1 + trial % 4;
    auto r = random_line(rng, n, k, false);
    SolveCounters cnt;
    auto dp = solve_one_sided(r.inst, Side::Left, std::nullopt, std::nullopt, &cnt);
    auto bf = brute_force_line(r.inst);
    REQUIRE(dp.has_value() == bf.cost.has_value());
    CHECK(cnt.relaxations <= static_cast<std::uint64_t>(n * k * k + 2 * k));
    if (dp) {
      ++feasible;
      CHECK(dp->total() == *bf.cost);
      CHECK(dp->choice == bf.choice);
    }
  }
  CHECK(feasible > 30);
}

TEST_CASE("switchover enumeration") {
  SUBCASE("one side only gives none") {
    std::mt19937_64 rng(1);
    auto r = random_line(rng, 4, 3, false, false);
    CHECK(enumerate_switchovers(r.inst).empty());
  }
  SUBCASE("two stops with one label per side") {
    auto inst = tiny({{rect_candidate(0, 0, 0, Side::Left, -0.5, 0.5, 0.5, 1.5, 0.0),
                       rect_candidate(1, 0, 0, Side::Right, -0.5, -1.5, 0.5, -0.5, 0.0)},
                      {rect_candidate(2, 0, 1, Side::Left, 1.5, 0.5, 2.5, 1.5, 0.0),
                       rect_candidate(3, 0, 1, Side::Right, 1.5, -1.5, 2.5, -0.5, 0.0)}});
    const auto so = enumerate_switchovers(inst);
    REQUIRE(so.size() == 2);
    CHECK(so[0].first == 0);
    CHECK(so[0].second == 1);
    CHECK(so[1].first == 1);
    CHECK(so[1].second == 0);
  }
  SUBCASE("matches a quadratic pair scan") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
      auto r = random_line(rng, 4, 3, true, false);
      std::size_t expected = 0;
      for (int j = 0; j + 1 < 4; ++j)
        for (const auto& a : r.inst.candidates[j])
          for (const auto& b : r.inst.candidates[j + 1])
            if (a.side != b.side && !polygons_intersect(a.polygon, b.polygon)) ++expected;
      CHECK(enumerate_switchovers(r.inst).size() == expected);
      CHECK(enumerate_switchovers(r.inst).size() <= 3u * 9u);
    }
  }
}

TEST_CASE("compatibility of switchovers") {
  // two stops per side pattern: L L R R
  auto inst = tiny({{rect_candidate(0, 0, 0, Side::Left, -0.5, 0.5, 0.5, 1.5, 0.1),
                     rect_candidate(1, 0, 0, Side::Right, -0.5, -1.5, 0.5, -0.5, 0.2)},
                    {rect_candidate(2, 0, 1, Side::Left, 1.5, 0.5, 2.5, 1.5, 0.1),
                     rect_candidate(3, 0, 1, Side::Right, 1.5, -1.5, 2.5, -0.5, 0.2)},
                    {rect_candidate(4, 0, 2, Side::Left, 3.5, 0.5, 4.5, 1.5, 0.1),
                     rect_candidate(5, 0, 2, Side::Right, 3.5, -1.5, 4.5, -0.5, 0.2)}});
  const Switchover lr0{SwitchoverKind::Real, 0, 0, 3};  // L at 0, R at 1
  const Switchover rl1{SwitchoverKind::Real, 1, 3, 4};  // R at 1, L at 2
  const Switchover lr1{SwitchoverKind::Real, 1, 2, 5};  // L at 1, R at 2
  CHECK_FALSE(compatible(inst, lr0, lr1));  // ends right, next starts left
  auto shared = compatible(inst, lr0, rl1);
  REQUIRE(shared);
  const CostWeights w;
  const double expected = w.switchover_gap_factor / 1 + w2(inst.candidates[1][1], inst.candidates[2][0], w) +
                          w1(inst.candidates[2][0], StyleKind::Curved, w);
  CHECK(shared->cost == doctest::Approx(expected).epsilon(1e-12));
  auto bt = compatible(inst, Switchover::bottom(), Switchover::top(3));
  REQUIRE(bt);
  const auto left = solve_one_sided(inst, Side::Left);
  const auto right = solve_one_sided(inst, Side::Right);
  REQUIRE(left);
  REQUIRE(right);
  CHECK(bt->cost == doctest::Approx(std::min(left->total(), right->total())).epsilon(1e-12));
}

TEST_CASE("two-sided: prefers a cheaper one-sided labeling") {
  // all-left costs 10*0.4*3 = 12, all-right 36; a switch costs the 150 xdir
  // penalty because right labels point the other way
  std::vector<std::vector<Candidate>> cs;
  int id = 0;
  for (int i = 0; i < 3; ++i) {
    const double x = 2.0 * i;
    cs.push_back({rect_candidate(id++, 0, i, Side::Left, x - 0.5, 0.5, x + 0.5, 1.5, 0.4),
                  rect_candidate(id++, 0, i, Side::Right, x - 0.5, -1.5, x + 0.5, -0.5, std::numbers::pi - 1.2)});
  }
  auto inst = tiny(cs);
  auto s = solve_two_sided(inst);
  REQUIRE(s);
  CHECK(s->choice == std::vector<int>{0, 0, 0});
  CHECK(s->total() == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(s->switchovers.empty());
}

TEST_CASE("two-sided: a stop without usable labels makes the line unlabelable") {
  auto inst = tiny({{rect_candidate(0, 0, 0, Side::Left, 0, 1, 1, 2, 0.0)}, {}});
  CHECK_FALSE(solve_two_sided(inst));
}

TEST_CASE("two-sided matches brute force on random instances") {
  std::mt19937_64 rng(11);
  int feasible = 0, switching = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 7, k = 1 + trial % 4;
    auto r = random_line(rng, n, k, true);
    auto dp = solve_two_sided(r.inst);
    auto bf = brute_force_line(r.inst);
    REQUIRE(dp.has_value() == bf.cost.has_value());
    if (!dp) continue;
    ++feasible;
    if (!dp->switchovers.empty()) ++switching;
    CHECK(dp->total() == *bf.cost);
    // self-consistency with the canonical cost
    const auto labels = materialize(r.inst, *dp);
    CHECK(line_cost(labels, r.inst.style, r.inst.weights).total() == dp->total());
  }
  CHECK(feasible > 60);
  CHECK(switching > 10);
}

TEST_CASE("removing a candidate never lowers the optimum") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    auto r = random_line(rng, 5, 3, true);
    auto full = solve_two_sided(r.inst);
    if (!full) continue;
    for (int s = 0; s < 5; ++s) {
      if (r.inst.candidates[s].size() < 2) continue;
      auto reduced = r.inst;
      reduced.candidates[s].erase(reduced.candidates[s].begin());
      auto sub = solve_two_sided(reduced);
      if (sub) CHECK(sub->total() >= full->total());
    }
  }
}

TEST_CASE("min_path") {
  SUBCASE("single edge") {
    auto r = min_path(2, 0, 1, [](int v, const EdgeSink& out) {
      if (v == 0) out(1, 5.0);
    });
    REQUIRE(r);
    CHECK(r->cost == 5.0);
    CHECK(r->path == std::vector<int>{0, 1});
  }
  SUBCASE("unreachable target") {
    auto r = min_path(3, 0, 2, [](int v, const EdgeSink& out) {
      if (v == 0) out(1, 1.0);
    });
    CHECK_FALSE(r);
  }
  SUBCASE("random DAG against Bellman-Ford style relaxation") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      const int n = 50;
      std::multimap<int, std::pair<int, double>> edges;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (U(rng) < 0.08) edges.insert({a, {b, 10.0 * U(rng)}});
      std::vector<double> ref(n, std::numeric_limits<double>::infinity());
      ref[0] = 0.0;
      for (int round = 0; round < n; ++round)
        for (const auto& [a, e] : edges) ref[e.first] = std::min(ref[e.first], ref[a] + e.second);
      auto r = min_path(n, 0, n - 1, [&](int v, const EdgeSink& out) {
        auto [lo, hi] = edges.equal_range(v);
        for (auto it = lo; it != hi; ++it) out(it->second.first, it->second.second);
      });
      CHECK(r.has_value() == std::isfinite(ref[n - 1]));
      if (r) CHECK(r->cost == doctest::Approx(ref[n - 1]).epsilon(1e-12));
    }
  }
}
