// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "metrolabel/feasibility.hpp"
#include "metrolabel/hardness.hpp"
#include "metrolabel/io.hpp"
#include "metrolabel/oracle.hpp"
#include "metrolabel/pipeline.hpp"
#include "support.hpp"
#include "synthetic.hpp"

using namespace metrolabel;
using testsupport::rect_candidate;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

int failures = 0;

void report(int number, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s (%s)\n", o.pass ? "PASS" : "FAIL", number, title.c_str(), o.detail.str().c_str());
  std::fflush(stdout);
}

void oracle_equivalence(Outcome& o) {
  std::mt19937_64 rng(1001);
  const auto t0 = Clock::now();
  int feasible = 0;
  const int trials = 240;
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + t % 7, k = 1 + (t / 7) % 4;
    auto r = testsupport::random_line(rng, n, k, true);
    const auto dp = solve_two_sided(r.inst);
    OracleOptions opts;
    opts.budget = 0;
    const auto ex = exact_labeling(r.map, r.as_map(), r.inst.weights, opts);
    o.require(dp.has_value() == ex.has_value(), "feasibility differs at trial " + std::to_string(t));
    if (dp && ex) {
      ++feasible;
      o.require(dp->total() == ex->cost, "cost differs at trial " + std::to_string(t));
    }
  }
  const double s = seconds_since(t0);
  o.require(s < 60.0, "too slow");
  o.detail << trials << " instances, " << feasible << " feasible, " << s << " s";
}

void one_sided(Outcome& o) {
  std::mt19937_64 rng(1002);
  int feasible = 0;
  std::uint64_t worst = 0;
  const int trials = 240;
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + t % 8, k = 1 + (t / 8) % 4;
    auto r = testsupport::random_line(rng, n, k, false);
    SolveCounters cnt;
    const auto dp = solve_one_sided(r.inst, Side::Left, std::nullopt, std::nullopt, &cnt);
    const auto bf = testsupport::brute_force_line(r.inst);
    o.require(dp.has_value() == bf.cost.has_value(), "feasibility differs at trial " + std::to_string(t));
    if (dp && bf.cost) {
      ++feasible;
      o.require(dp->total() == *bf.cost, "cost differs at trial " + std::to_string(t));
    }
    const auto bound = static_cast<std::uint64_t>(n * k * k + 2 * k);
    o.require(cnt.relaxations <= bound, "relaxations over bound at trial " + std::to_string(t));
    worst = std::max(worst, cnt.relaxations);
  }
  o.detail << trials << " instances, " << feasible << " feasible, max relaxations " << worst;
}

bool brute_pairs(const std::vector<RepresentativePair>& pairs, const MetroMap& map) {
  const std::size_t n = pairs.size();
  std::vector<bool> hits_left(n), hits_right(n);
  for (std::size_t i = 0; i < n; ++i) {
    hits_left[i] = label_hits_any_line(pairs[i].left, map);
    hits_right[i] = label_hits_any_line(pairs[i].right, map);
  }
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const bool ri = (mask >> i) & 1u;
      if (ri ? hits_right[i] : hits_left[i]) ok = false;
      const Candidate& a = ri ? pairs[i].right : pairs[i].left;
      for (std::size_t j = i + 1; j < n && ok; ++j) {
        const Candidate& b = (mask >> j) & 1u ? pairs[j].right : pairs[j].left;
        if (polygons_intersect(a.polygon, b.polygon)) ok = false;
      }
    }
    if (ok) return true;
  }
  return false;
}

void two_sat(Outcome& o) {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int feasible = 0;
  const int trials = 520;
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + t % 16;
    MetroMap m;
    m.style = StyleKind::Curved;
    MetroLine l{"A", Polyline({{-5, 0}, {2.0 * n + 5, 0}}), {}};
    for (int i = 0; i < n; ++i) l.stops.push_back({"s0_" + std::to_string(i), "Stop", {2.0 * i, 0}, "A", i});
    m.lines.push_back(std::move(l));
    std::vector<RepresentativePair> pairs;
    int id = 0;
    for (int i = 0; i < n; ++i) {
      auto make = [&](Side s) {
        const double x0 = 2.0 * i - 0.5 - 2.0 * U(rng), x1 = 2.0 * i + 0.5 + 2.0 * U(rng);
        const double lo = 0.3 - 0.35 * U(rng), hi = lo + 0.5 + U(rng);
        return s == Side::Left ? rect_candidate(id++, 0, i, s, x0, lo, x1, hi, 0)
                               : rect_candidate(id++, 0, i, s, x0, -hi, x1, -lo, 0);
      };
      auto left = make(Side::Left);
      auto right = make(Side::Right);
      pairs.push_back({"s0_" + std::to_string(i), 0, i, left, right});
    }
    const auto got = two_sat_feasible(pairs, m, {});
    o.require(got.has_value() == brute_pairs(pairs, m), "disagreement at trial " + std::to_string(t));
    if (got) {
      ++feasible;
      std::string why;
      o.require(is_valid_labeling(m, *got, &why), "invalid witness: " + why);
    }
  }
  o.detail << trials << " systems, " << feasible << " feasible";
}

std::vector<MetroMap> corpus() {
  std::mt19937_64 rng(1004);
  std::vector<MetroMap> maps;
  for (int t = 0; t < 50; ++t) {
    testsupport::SyntheticSpec spec;
    spec.lines = 2 + t % 3;
    spec.stops_per_line = 3 + t % 4;
    spec.style = t % 2 ? StyleKind::Curved : StyleKind::Octilinear;
    maps.push_back(testsupport::synthetic_map(rng, spec));
  }
  return maps;
}

void validity(Outcome& o) {
  int checked = 0;
  for (const auto& m : corpus()) {
    PipelineConfig cfg;
    RunStats stats;
    const auto prep = prepare(m, cfg, stats);
    o.require(prep.has_value(), "no scale found");
    if (!prep) continue;
    for (const auto& line : prep->candidates) {
      o.require(satisfies_separation(line), "separation violated after pre-selection");
      o.require(satisfies_transitivity(line), "transitivity violated after pre-selection");
    }
    for (const auto& r : {dyn_alg(m, cfg), greedy_alg(m, cfg), oracle_alg(m, cfg, 0)}) {
      o.require(r.labeling.has_value(), r.stats.algorithm + " found nothing");
      if (!r.labeling) continue;
      std::string why;
      o.require(is_valid_labeling(m, *r.labeling, &why), r.stats.algorithm + ": " + why);
      ++checked;
    }
  }
  o.detail << checked << " labelings";
}

// Three stops on a straight curved-style line: switching one stop away from
// the costly side pays two x-direction penalties, so greedy stays put.
struct Adversarial {
  MetroMap map;
  MapCandidates cands;
  Labeling initial;
};

Adversarial adversarial() {
  Adversarial a;
  a.map.style = StyleKind::Curved;
  MetroLine l{"A", Polyline({{-5, 0}, {13, 0}}), {}};
  for (int i = 0; i < 3; ++i) l.stops.push_back({"s0_" + std::to_string(i), "Stop", {4.0 * i, 0}, "A", i});
  a.map.lines.push_back(std::move(l));
  a.cands.assign(1, LineCandidates(3));
  a.initial.lines.push_back({0, {}, {}, {}});
  for (int i = 0; i < 3; ++i) {
    const double x = 4.0 * i;
    auto right = rect_candidate(2 * i, 0, i, Side::Right, x - 0.5, -2, x + 0.5, -1, 0.5);
    auto left = rect_candidate(2 * i + 1, 0, i, Side::Left, x - 0.5, 1, x + 0.5, 2, std::numbers::pi);
    a.initial.lines[0].labels.push_back(right);
    a.cands[0][i] = {right, left};
  }
  finalize(a.initial, a.map.style, {});
  return a;
}

void ordering(Outcome& o) {
  int lines = 0, strictly = 0;
  for (const auto& m : corpus()) {
    PipelineConfig cfg;
    RunStats stats;
    const auto prep = prepare(m, cfg, stats);
    if (!prep) continue;
    const auto dyn = solve_lines(m, prep->candidates, prep->initial, cfg);
    const auto greedy = greedy_refine(m, prep->candidates, prep->initial, cfg.weights);
    for (std::size_t li = 0; li < m.lines.size(); ++li) {
      ++lines;
      const double d = dyn.lines[li].cost.total(), g = greedy.lines[li].cost.total();
      o.require(d <= g, "dyn worse on line " + m.lines[li].id);
      if (d < g) ++strictly;
    }
  }
  const auto a = adversarial();
  PipelineConfig cfg;
  const double d = solve_lines(a.map, a.cands, a.initial, cfg).cost.total();
  const double g = greedy_refine(a.map, a.cands, a.initial, cfg.weights).cost.total();
  o.require(d < g, "adversarial instance not strict");
  o.detail << lines << " lines, " << strictly << " strictly better; adversarial dyn " << d << " vs greedy " << g;
}

MonotoneFormula random_formula(std::mt19937_64& rng, int vars) {
  MonotoneFormula f;
  f.num_vars = vars;
  const int clauses = 1 + static_cast<int>(rng() % 3);
  for (int c = 0; c < clauses; ++c) {
    std::array<int, 3> lits{};
    for (int& x : lits) x = 1 + static_cast<int>(rng() % vars);
    std::sort(lits.begin(), lits.end());
    if (rng() % 2) {
      f.positive_clauses.push_back(lits);
    } else {
      for (int& x : lits) x = -x;
      f.negative_clauses.push_back(lits);
    }
  }
  return f;
}

void hardness(Outcome& o) {
  const auto t0 = Clock::now();
  std::vector<MonotoneFormula> formulas;
  for (int n = 1; n <= 3; ++n) {
    std::vector<std::pair<bool, std::array<int, 3>>> types;
    for (int a = 1; a <= n; ++a)
      for (int b = a; b <= n; ++b)
        for (int c = b; c <= n; ++c) {
          types.push_back({true, {a, b, c}});
          types.push_back({false, {-a, -b, -c}});
        }
    std::vector<std::vector<int>> picks{{}};
    for (int i = 0; i < static_cast<int>(types.size()); ++i) {
      picks.push_back({i});
      for (int j = i + 1; j < static_cast<int>(types.size()); ++j) picks.push_back({i, j});
    }
    for (const auto& p : picks) {
      MonotoneFormula f;
      f.num_vars = n;
      for (int i : p) (types[i].first ? f.positive_clauses : f.negative_clauses).push_back(types[i].second);
      formulas.push_back(f);
    }
  }
  std::mt19937_64 rng(1006);
  for (int extra = 0; extra < 10;) {
    auto f = random_formula(rng, 4);
    if (!with_embedding(f)) continue;
    formulas.push_back(f);
    ++extra;
  }

  int total = 0, skipped = 0, sat = 0;
  for (const auto& f : formulas) {
    const auto e = with_embedding(f);
    if (!e) {
      ++skipped;
      continue;
    }
    ++total;
    const auto r = reduce(*e);
    OracleOptions opts;
    opts.budget = 0;
    opts.first_feasible = true;
    const auto res = exact_labeling(r.map, r.candidates, CostWeights{}, opts);
    const bool truth = satisfiable(f);
    sat += truth;
    o.require(res.has_value() == truth, "labelability differs from satisfiability");
    if (res) o.require(evaluate(f, assignment_of(r, res->labeling)), "decoded assignment does not satisfy");
  }
  const double s = seconds_since(t0);
  o.require(s < 300.0, "too slow");
  o.detail << total << " formulas (" << sat << " satisfiable), " << skipped << " without a planar embedding, " << s
           << " s";
}

Candidate unit_label(double alpha, SegmentKind seg, Shape shape) {
  auto c = rect_candidate(0, 0, 0, Side::Left, 0, 1, 1, 2, alpha);
  c.segment = seg;
  c.shape = shape;
  return c;
}

void cost_units(Outcome& o) {
  const CostWeights w;
  const Switchover first{SwitchoverKind::Real, 2, 0, 1};
  o.require(w3(first, {SwitchoverKind::Real, 3, 2, 3}, w) == 200.0, "w3(d=1)");
  o.require(w3(first, {SwitchoverKind::Real, 6, 2, 3}, w) == 50.0, "w3(d=4)");
  const double q = std::numbers::pi / 4;
  using SK = SegmentKind;
  o.require(w1(unit_label(0, SK::Horizontal, Shape::Horizontal), StyleKind::Octilinear, w) == 200.0,
            "horizontal label on horizontal segment");
  o.require(w1(unit_label(q, SK::Vertical, Shape::Diagonal), StyleKind::Octilinear, w) == 100.0,
            "diagonal label on vertical segment");
  o.require(w1(unit_label(q, SK::Diagonal, Shape::Diagonal), StyleKind::Octilinear, w) == 100.0,
            "diagonal label on diagonal segment");
  o.require(w1(unit_label(0, SK::Vertical, Shape::Horizontal), StyleKind::Octilinear, w) == 0.0,
            "horizontal label on vertical segment");
  o.require(w1(unit_label(q, SK::Horizontal, Shape::Diagonal), StyleKind::Octilinear, w) == 0.0,
            "diagonal label on horizontal segment");
  const double curved = w1(unit_label(q, SK::Free, Shape::Curved), StyleKind::Curved, w);
  o.require(std::abs(curved - 10.0 * q) <= 1e-12, "curved w1 at a quarter pi");
  o.detail << "curved w1 " << curved;
}

std::size_t count_for(StyleKind style, std::vector<Point> path) {
  MetroMap m;
  m.style = style;
  m.label = {1.0, 0.5, 0.5};
  MetroLine l{"A", Polyline(std::move(path)), {}};
  l.stops.push_back({"A0", "Central", {0, 0}, "A", 0});
  m.lines.push_back(std::move(l));
  return generate_candidates(m, params_for(m, 1.0))[0][0].size();
}

void candidate_counts(Outcome& o) {
  const auto h = count_for(StyleKind::Octilinear, {{-10, 0}, {10, 0}});
  const auto v = count_for(StyleKind::Octilinear, {{0, -10}, {0, 10}});
  const auto flat = count_for(StyleKind::Curved, {{-10, 0}, {10, 0}});
  const auto steep = count_for(StyleKind::Curved, {{0, -10}, {0, 10}});
  o.require(h == 10, "octilinear horizontal");
  o.require(v == 6, "octilinear vertical");
  o.require(flat == 12, "curved near-horizontal line");
  o.require(steep == 6, "curved steep normal");
  o.detail << h << "/" << v << "/" << flat << "/" << steep;
}

MetroMap benchmark_map() {
  std::mt19937_64 rng(1009);
  testsupport::SyntheticSpec spec;
  spec.lines = 12;
  spec.stops_per_line = 16;
  spec.style = StyleKind::Curved;
  auto m = testsupport::synthetic_map(rng, spec);
  std::size_t stops = 0;
  for (const auto& l : m.lines) stops += l.stops.size();
  // trim from the longest lines down to 173 stops
  while (stops > 173) {
    auto it = std::max_element(m.lines.begin(), m.lines.end(),
                               [](const MetroLine& a, const MetroLine& b) { return a.stops.size() < b.stops.size(); });
    it->stops.pop_back();
    --stops;
  }
  return m;
}

void performance(Outcome& o) {
  const auto m = benchmark_map();
  std::size_t stops = 0;
  for (const auto& l : m.lines) stops += l.stops.size();
  o.require(stops == 173 && m.lines.size() == 12, "benchmark map shape");
  auto t0 = Clock::now();
  const auto r = dyn_alg(m, {});
  const double map_s = seconds_since(t0);
  o.require(r.labeling.has_value(), "benchmark map not labeled");
  o.require(map_s < 2.0, "map too slow");
  const double k = static_cast<double>(r.stats.candidates_step1) / static_cast<double>(stops);

  std::mt19937_64 rng(1010);
  auto line = testsupport::random_line(rng, 200, 10, true);
  t0 = Clock::now();
  const auto sol = solve_two_sided(line.inst);
  const double line_s = seconds_since(t0);
  o.require(line_s < 1.0, "line too slow");
  o.detail << stops << " stops, k " << k << ", dyn " << map_s << " s; 200-stop line " << line_s << " s"
           << (sol ? "" : " (infeasible)");
}

void determinism(Outcome& o) {
  std::mt19937_64 rng(1011);
  testsupport::SyntheticSpec spec;
  spec.lines = 6;
  spec.stops_per_line = 10;
  spec.style = StyleKind::Curved;
  const auto m = testsupport::synthetic_map(rng, spec);
  const auto a = dyn_alg(m, {}), b = dyn_alg(m, {});
  o.require(a.labeling && b.labeling, "no labeling");
  if (!a.labeling || !b.labeling) return;
  const auto sa = stats_json(a.stats), sb = stats_json(b.stats);
  const auto va = render_svg(m, &*a.labeling, {}), vb = render_svg(m, &*b.labeling, {});
  o.require(sa == sb, "stats differ");
  o.require(va == vb, "svg differs");
  o.detail << sa.size() << " + " << va.size() << " bytes";
}

}  // namespace

int main() {
  report(1, "two-sided line solver equals the exhaustive oracle", oracle_equivalence);
  report(2, "one-sided solver is exact within the relaxation bound", one_sided);
  report(3, "2SAT feasibility agrees with brute force", two_sat);
  report(4, "emitted labelings are valid on the synthetic corpus", validity);
  report(5, "dyn is never worse than greedy per line", ordering);
  report(6, "reduced maps are labelable iff the formula is satisfiable", hardness);
  report(7, "cost function units", cost_units);
  report(8, "candidate counts", candidate_counts);
  report(9, "performance", performance);
  report(10, "repeated runs are byte-identical", determinism);
  return failures == 0 ? 0 : 1;
}
