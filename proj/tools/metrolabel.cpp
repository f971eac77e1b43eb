#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "metrolabel/hardness.hpp"
#include "metrolabel/io.hpp"
#include "metrolabel/oracle.hpp"
#include "metrolabel/pipeline.hpp"

namespace {

using namespace metrolabel;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNoLabeling = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct LabelArgs {
  std::string input;
  std::string algo = "dyn";
  double scale_min = 0.2;
  double scale_max = 1.0;
  int scale_steps = 20;
  std::string weights;
  std::string svg;
  std::string stats;
  bool timings = false;
  std::uint64_t budget = 1'000'000;
};

int run_label(const LabelArgs& a) {
  const MetroMap map = load_map(a.input);
  PipelineConfig cfg;
  if (!a.weights.empty()) cfg.weights = parse_weights(read_file(a.weights));
  if (!(a.scale_min > 0) || a.scale_min > a.scale_max || a.scale_steps < 1)
    throw std::invalid_argument("need 0 < --scale-min <= --scale-max and --scale-steps >= 1");
  cfg.scale = {a.scale_min, a.scale_max, a.scale_steps};

  RunResult r;
  if (a.algo == "dyn")
    r = dyn_alg(map, cfg);
  else if (a.algo == "greedy")
    r = greedy_alg(map, cfg);
  else
    r = oracle_alg(map, cfg, a.budget);

  if (!a.stats.empty()) write_atomic(a.stats, stats_json(r.stats, {a.timings}));
  if (!r.labeling) {
    std::cerr << "no labeling found: " << r.stats.failure << "\n";
    return kNoLabeling;
  }
  if (!a.svg.empty()) {
    SvgOptions opts;
    opts.text_height = map.label.height * r.stats.scale;
    write_atomic(a.svg, render_svg(map, &*r.labeling, opts));
  }
  std::cout << r.stats.algorithm << ": scale " << fixed6(r.stats.scale) << ", cost " << fixed6(r.stats.cost.total())
            << ", " << r.stats.switchovers << " switchovers\n";
  return kOk;
}

int run_hardgen(const std::string& formula_path, const std::string& out, int spacing) {
  MonotoneFormula f = parse_formula(read_file(formula_path));
  if (f.order.empty()) {
    auto embedded = with_embedding(f);
    if (!embedded) throw std::invalid_argument("formula has no crossing-free layout");
    f = std::move(*embedded);
  }
  const Reduction r = reduce(f, {spacing});
  write_atomic(out, serialize_map(r.map));
  std::cout << r.map.lines[0].stops.size() << " stops, formula " << (satisfiable(f) ? "satisfiable" : "unsatisfiable")
            << "\n";
  return kOk;
}

int run_validate(const std::string& input) {
  const MetroMap map = load_map(input);
  std::size_t stops = 0;
  for (const auto& l : map.lines) stops += l.stops.size();
  std::cout << "ok: " << map.lines.size() << " lines, " << stops << " stops\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metro map labeling"};
  app.require_subcommand(1);

  LabelArgs la;
  auto* label = app.add_subcommand("label", "Label the stops of a map");
  label->add_option("--input", la.input, "Map JSON")->required();
  label->add_option("--algo", la.algo, "dyn, greedy or oracle")
      ->check(CLI::IsMember({"dyn", "greedy", "oracle"}))
      ->capture_default_str();
  label->add_option("--scale-min", la.scale_min)->capture_default_str();
  label->add_option("--scale-max", la.scale_max)->capture_default_str();
  label->add_option("--scale-steps", la.scale_steps)->capture_default_str();
  label->add_option("--weights", la.weights, "Cost weights JSON");
  label->add_option("--svg", la.svg, "SVG output");
  label->add_option("--stats", la.stats, "Stats JSON output");
  label->add_flag("--timings", la.timings, "Include step timings in the stats");
  label->add_option("--oracle-budget", la.budget, "Largest search space the oracle accepts")->capture_default_str();

  std::string formula, out;
  int spacing = kDefaultSpacing;
  auto* hardgen = app.add_subcommand("hardgen", "Build the labeling instance of a monotone 3-SAT formula");
  hardgen->add_option("--formula", formula, "Formula JSON")->required();
  hardgen->add_option("--out", out, "Map JSON output")->required();
  hardgen->add_option("--spacing", spacing, "Chain step length")->check(CLI::Range(55, 75))->capture_default_str();

  std::string to_check;
  auto* validate = app.add_subcommand("validate", "Check a map document");
  validate->add_option("--input", to_check, "Map JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kInputError;
  }

  try {
    if (label->parsed()) return run_label(la);
    if (hardgen->parsed()) return run_hardgen(formula, out, spacing);
    return run_validate(to_check);
  } catch (const BudgetExceeded& e) {
    std::cerr << "oracle: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kInputError;
}
