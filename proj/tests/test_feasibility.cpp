#include <doctest.h>

#include <random>

#include "metrolabel/feasibility.hpp"
#include "metrolabel/oracle.hpp"
#include "support.hpp"

using namespace metrolabel;
using testsupport::rect_candidate;

namespace {

// Horizontal line through y = 0 with n stops two units apart.
MetroMap flat_map(int n) {
  MetroMap m;
  m.style = StyleKind::Curved;
  MetroLine l{"A", Polyline({{-5, 0}, {2.0 * n + 5, 0}}), {}};
  for (int i = 0; i < n; ++i) l.stops.push_back({"s0_" + std::to_string(i), "Stop", {2.0 * i, 0}, "A", i});
  m.lines.push_back(std::move(l));
  return m;
}

bool brute_two_sat(int n, const std::vector<std::pair<int, int>>& clauses) {
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    auto lit = [&](int l) { return (((mask >> (l / 2)) & 1u) != 0) == (l % 2 == 0); };
    bool ok = true;
    for (auto [a, b] : clauses)
      if (!lit(a) && !lit(b)) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

bool brute_pairs(const std::vector<RepresentativePair>& pairs, const MetroMap& map) {
  const std::size_t n = pairs.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<const Candidate*> pick;
    for (std::size_t i = 0; i < n; ++i) pick.push_back((mask >> i) & 1u ? &pairs[i].right : &pairs[i].left);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (label_hits_any_line(*pick[i], map)) ok = false;
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if (polygons_intersect(pick[i]->polygon, pick[j]->polygon)) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("representatives") {
  auto m = flat_map(1);
  MapCandidates c(1, LineCandidates(1));
  // right: w1 5 and 2, both clear of the line
  c[0][0] = {rect_candidate(0, 0, 0, Side::Left, 0, 1, 1, 2, 0.7),
             rect_candidate(1, 0, 0, Side::Right, 0, -2, 1, -1, 0.5),
             rect_candidate(2, 0, 0, Side::Right, 1, -2, 2, -1, 0.2)};
  auto reps = choose_representatives(m, c, {});
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].right.id == 2);
  CHECK(reps[0].left.id == 0);

  // every right candidate crosses the line: cheapest of them anyway
  c[0][0] = {rect_candidate(0, 0, 0, Side::Left, 0, 1, 1, 2, 0.7),
             rect_candidate(1, 0, 0, Side::Right, 0, -2, 1, 0.5, 0.5),
             rect_candidate(2, 0, 0, Side::Right, 1, -2, 2, 0.5, 0.2)};
  reps = choose_representatives(m, c, {});
  CHECK(reps[0].right.id == 2);

  // a cheaper line-hitting candidate loses to a line-free one
  c[0][0] = {rect_candidate(0, 0, 0, Side::Left, 0, 1, 1, 2, 0.7),
             rect_candidate(1, 0, 0, Side::Right, 0, -2, 1, -1, 0.5),
             rect_candidate(2, 0, 0, Side::Right, 1, -2, 2, 0.5, 0.2)};
  reps = choose_representatives(m, c, {});
  CHECK(reps[0].right.id == 1);

  c[0][0] = {rect_candidate(0, 0, 0, Side::Left, 0, 1, 1, 2, 0.7)};
  CHECK_THROWS_AS(choose_representatives(m, c, {}), MissingSide);
}

TEST_CASE("2SAT basics") {
  TwoSat a(2);
  a.add_clause(TwoSat::pos(0), TwoSat::pos(1));
  a.add_unit(TwoSat::neg(0));
  const auto v = a.solve();
  REQUIRE(v);
  CHECK_FALSE((*v)[0]);
  CHECK((*v)[1]);

  TwoSat b(1);
  b.add_unit(TwoSat::pos(0));
  b.add_unit(TwoSat::neg(0));
  CHECK_FALSE(b.solve());

  TwoSat empty(3);
  CHECK(empty.solve());
}

TEST_CASE("2SAT agrees with brute force") {
  std::mt19937_64 rng(23);
  int sat = 0;
  for (int t = 0; t < 600; ++t) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const int m = static_cast<int>(rng() % (3 * n + 1));
    std::vector<std::pair<int, int>> clauses;
    TwoSat s(n);
    for (int i = 0; i < m; ++i) {
      const int a = static_cast<int>(rng() % (2 * n)), b = static_cast<int>(rng() % (2 * n));
      clauses.emplace_back(a, b);
      s.add_clause(a, b);
    }
    const auto got = s.solve();
    REQUIRE(got.has_value() == brute_two_sat(n, clauses));
    if (got) {
      ++sat;
      for (auto [a, b] : clauses) {
        auto lit = [&](int l) { return (*got)[l / 2] == (l % 2 == 0); };
        CHECK((lit(a) || lit(b)));
      }
    }
  }
  CHECK(sat > 50);
  CHECK(sat < 550);
}

TEST_CASE("representative feasibility") {
  const auto m = flat_map(2);
  // disjoint pairs: feasible
  std::vector<RepresentativePair> pairs{
      {"s0_0", 0, 0, rect_candidate(0, 0, 0, Side::Left, -0.5, 0.5, 0.5, 1.5, 0),
       rect_candidate(1, 0, 0, Side::Right, -0.5, -1.5, 0.5, -0.5, 0)},
      {"s0_1", 0, 1, rect_candidate(2, 0, 1, Side::Left, 1.5, 0.5, 2.5, 1.5, 0),
       rect_candidate(3, 0, 1, Side::Right, 1.5, -1.5, 2.5, -0.5, 0)}};
  auto l = two_sat_feasible(pairs, m, {});
  REQUIRE(l);
  CHECK(l->lines[0].labels.size() == 2);

  // both representatives of stop 0 cross the line
  auto bad = pairs;
  bad[0].left = rect_candidate(0, 0, 0, Side::Left, -0.5, -0.5, 0.5, 1.5, 0);
  bad[0].right = rect_candidate(1, 0, 0, Side::Right, -0.5, -1.5, 0.5, 0.5, 0);
  CHECK_FALSE(two_sat_feasible(bad, m, {}));

  // every cross pair collides; the labels sit past the end of the line
  auto crossed = pairs;
  crossed[0].left = rect_candidate(0, 0, 0, Side::Left, 20, 1, 22, 2, 0);
  crossed[0].right = rect_candidate(1, 0, 0, Side::Right, 20.5, 0.5, 22.5, 1.5, 0);
  crossed[1].left = rect_candidate(2, 0, 1, Side::Left, 21, 1.2, 23, 2.2, 0);
  crossed[1].right = rect_candidate(3, 0, 1, Side::Right, 21.5, 0.8, 23.5, 1.8, 0);
  CHECK_FALSE(brute_pairs(crossed, m));
  CHECK_FALSE(two_sat_feasible(crossed, m, {}));
  // one disjoint cross pair is enough
  crossed[1].right = rect_candidate(3, 0, 1, Side::Right, 30, 0.8, 32, 1.8, 0);
  const auto one = two_sat_feasible(crossed, m, {});
  REQUIRE(one);
  CHECK(one->lines[0].labels[0].id == 0);
  CHECK(one->lines[0].labels[1].id == 3);
}

TEST_CASE("representative feasibility agrees with brute force") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int feasible = 0;
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + static_cast<int>(rng() % (t < 20 ? 15 : 8));
    const auto m = flat_map(n);
    std::vector<RepresentativePair> pairs;
    int id = 0;
    for (int i = 0; i < n; ++i) {
      auto make = [&](Side s) {
        const double x0 = 2.0 * i - 0.5 - 2.0 * U(rng), x1 = 2.0 * i + 0.5 + 2.0 * U(rng);
        const double lo = 0.3 - 0.35 * U(rng), hi = lo + 0.5 + U(rng);
        return s == Side::Left ? rect_candidate(id++, 0, i, s, x0, lo, x1, hi, 0)
                               : rect_candidate(id++, 0, i, s, x0, -hi, x1, -lo, 0);
      };
      pairs.push_back({"s0_" + std::to_string(i), 0, i, make(Side::Left), make(Side::Right)});
    }
    const auto got = two_sat_feasible(pairs, m, {});
    REQUIRE(got.has_value() == brute_pairs(pairs, m));
    if (!got) continue;
    ++feasible;
    const auto& ls = got->lines[0].labels;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      CHECK_FALSE(label_hits_any_line(ls[i], m));
      for (std::size_t j = i + 1; j < ls.size(); ++j) CHECK_FALSE(polygons_intersect(ls[i].polygon, ls[j].polygon));
    }
  }
  CHECK(feasible > 20);
  CHECK(feasible < 290);
}

TEST_CASE("scale samples") {
  const auto s = scale_samples({0.2, 1.0, 20});
  REQUIRE(s.size() == 20);
  CHECK(s.front() == 1.0);
  CHECK(s.back() == 0.2);
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s[i] < s[i - 1]);
    CHECK(s[i] / s[i - 1] == doctest::Approx(s[1] / s[0]));
  }
  CHECK(scale_samples({0.5, 0.5, 1}) == std::vector<double>{0.5});
  CHECK_THROWS(scale_samples({0.0, 1.0, 5}));
  CHECK_THROWS(scale_samples({0.6, 0.5, 5}));
  CHECK_THROWS(scale_samples({0.2, 1.0, 0}));
}

TEST_CASE("scale search") {
  SUBCASE("isolated stop fits at full size") {
    MetroMap m;
    MetroLine l{"A", Polyline({{-10, 0}, {10, 0}}), {}};
    l.stops.push_back({"a", "Alone", {0, 0}, "A", 0});
    m.lines.push_back(l);
    const auto r = scale_search(m, {}, {});
    REQUIRE(r.found);
    CHECK(r.found->scale == 1.0);
    CHECK(r.attempted.size() == 1);
  }
  SUBCASE("stop squeezed between two lines") {
    // a middle stop at gap d from both neighbours: its flat labels fit once
    // scale * (offset + height) < d
    MetroMap m;
    m.label = {1.0, 0.6, 0.6};
    const double d = 1.2;
    for (int i = 0; i < 3; ++i) {
      const std::string id = "L" + std::to_string(i);
      MetroLine l{id, Polyline({{-100, d * i}, {100, d * i}}), {}};
      const double x = i == 1 ? 0.0 : (i == 0 ? -60.0 : 60.0);
      l.stops.push_back({id + "s", "Abc", {x, d * i}, id, 0});
      m.lines.push_back(l);
    }
    const ScaleSearchConfig cfg{0.2, 1.0, 20};
    const auto r = scale_search(m, cfg, {});
    REQUIRE(r.found);
    const double threshold = d / (0.6 + 1.0);
    double expected = 0;
    for (double x : scale_samples(cfg))
      if (x < threshold) {
        expected = x;
        break;
      }
    CHECK(r.found->scale == expected);
    CHECK(r.attempted.back() == expected);
    for (double x : r.attempted)
      if (x != expected) CHECK(x > threshold);
  }
  SUBCASE("no sampled scale works") {
    // serpentines above and below leave no room for any label of the stop
    auto serpentine = [](double sign) {
      std::vector<Point> v;
      for (int i = 0; i < 160; ++i) {
        const double y = sign * (0.1 + 0.05 * i);
        const bool forward = i % 2 == 0;
        v.push_back({forward ? -10.0 : 10.0, y});
        v.push_back({forward ? 10.0 : -10.0, y});
      }
      return Polyline(v);
    };
    MetroMap m;
    MetroLine a{"A", Polyline({{-10, 0}, {10, 0}}), {}};
    a.stops.push_back({"a", "Squeezed", {0, 0}, "A", 0});
    MetroLine b{"B", serpentine(1.0), {}};
    b.stops.push_back({"b", "Far", {0, 0.1}, "B", 0});
    MetroLine c{"C", serpentine(-1.0), {}};
    c.stops.push_back({"c", "Far", {0, -0.1}, "C", 0});
    m.lines = {a, b, c};
    const auto r = scale_search(m, {0.2, 1.0, 5}, {});
    CHECK_FALSE(r.found);
    CHECK(r.attempted.size() == 5);
  }
}
