#include "metrolabel/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "metrolabel/oracle.hpp"

namespace metrolabel {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::size_t count_candidates(const MapCandidates& c) {
  std::size_t n = 0;
  for (const auto& line : c)
    for (const auto& stop : line) n += stop.size();
  return n;
}

template <class F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
}

}  // namespace

int thread_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("METROLABEL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<long>(n, cap);
  }
  return std::max(1, n);
}

SequenceStats sequence_stats(const Labeling& l) {
  SequenceStats s;
  long total = 0;
  for (const auto& line : l.lines) {
    int run = 0;
    for (std::size_t i = 0; i < line.labels.size(); ++i) {
      ++run;
      if (i + 1 == line.labels.size() || line.labels[i + 1].side != line.labels[i].side) {
        s.min = s.runs == 0 ? run : std::min(s.min, run);
        s.max = std::max(s.max, run);
        total += run;
        ++s.runs;
        run = 0;
      }
    }
  }
  s.avg = s.runs ? static_cast<double>(total) / s.runs : 0.0;
  return s;
}

bool is_valid_labeling(const MetroMap& map, const Labeling& l, std::string* why) {
  auto fail = [&](std::string m) {
    if (why) *why = std::move(m);
    return false;
  };
  if (l.lines.size() != map.lines.size()) return fail("line count mismatch");
  std::vector<const Candidate*> all;
  for (std::size_t li = 0; li < map.lines.size(); ++li) {
    const auto& labels = l.lines[li].labels;
    if (labels.size() != map.lines[li].stops.size()) return fail("line " + map.lines[li].id + ": label count");
    for (std::size_t si = 0; si < labels.size(); ++si) {
      if (labels[si].stop_id != map.lines[li].stops[si].id)
        return fail("label of " + labels[si].stop_id + " placed at stop " + map.lines[li].stops[si].id);
      if (label_hits_any_line(labels[si], map)) return fail("label of " + labels[si].stop_id + " hits a line");
      all.push_back(&labels[si]);
    }
  }
  for (std::size_t a = 0; a < all.size(); ++a)
    for (std::size_t b = a + 1; b < all.size(); ++b)
      if (labels_conflict(*all[a], *all[b]))
        return fail("labels of " + all[a]->stop_id + " and " + all[b]->stop_id + " intersect");
  return true;
}

void fill_result_stats(RunStats& stats, const MetroMap& map, const Labeling& l) {
  stats.lines.clear();
  stats.switchovers = 0;
  for (std::size_t li = 0; li < l.lines.size(); ++li) {
    const auto& ll = l.lines[li];
    stats.lines.push_back({map.lines[li].id, ll.cost, static_cast<int>(ll.switchovers.size())});
    stats.switchovers += static_cast<int>(ll.switchovers.size());
  }
  stats.cost = l.cost;
  stats.sequences = sequence_stats(l);
}

std::optional<Prepared> prepare(const MetroMap& map, const PipelineConfig& cfg, RunStats& stats) {
  auto t0 = Clock::now();
  {
    StyleParams p = params_for(map, cfg.scale.x_max);
    p.samples_per_side = cfg.samples_per_side;
    stats.candidates_step1 = count_candidates(generate_candidates(map, p));
  }
  stats.timings.generate_ms = ms_since(t0);

  t0 = Clock::now();
  ScaleSearchResult found = scale_search(map, cfg.scale, cfg.weights, cfg.samples_per_side);
  stats.timings.scale_ms = ms_since(t0);
  stats.attempted_scales = found.attempted;
  if (!found.found) {
    stats.success = false;
    stats.failure = "no sampled scale admits a labeling";
    return std::nullopt;
  }
  Prepared prep{std::move(found.found->candidates), std::move(found.found->initial), {}};
  stats.scale = found.found->scale;
  stats.scale_ratio = stats.scale / cfg.scale.x_max;

  t0 = Clock::now();
  const ProtectedIds keep = ids_of(prep.initial);
  for (auto& line : prep.candidates) {
    stats.removed_separation += enforce_separation(line, keep, map.style, cfg.weights);
    stats.removed_transitivity += enforce_transitivity(line, keep);
  }
  std::vector<std::optional<LineSolution>> ranking(prep.candidates.size());
  parallel_for(static_cast<int>(prep.candidates.size()), thread_count(cfg.threads), [&](int li) {
    LineInstance inst{map.style, prep.candidates[li], cfg.weights};
    ranking[li] = solve_two_sided(inst);
  });
  for (const auto& r : ranking)
    if (!r) ++stats.ranking_fallbacks;
  const auto order = rank_candidates(prep.candidates, ranking, map.style, cfg.weights);
  const auto rep = make_independent(prep.candidates, map, keep, order);
  stats.removed_line_hits = rep.removed_line_hits;
  stats.removed_conflicts = rep.removed_conflicts;
  stats.candidates_step3 = count_candidates(prep.candidates);
  stats.timings.preselect_ms = ms_since(t0);
  prep.stats = stats;
  return prep;
}

Labeling solve_lines(const MetroMap& map, const MapCandidates& cands, const Labeling& initial,
                     const PipelineConfig& cfg, int* fallbacks) {
  const int n = static_cast<int>(cands.size());
  std::vector<std::optional<LineSolution>> sol(n);
  parallel_for(n, thread_count(cfg.threads), [&](int li) {
    LineInstance inst{map.style, cands[li], cfg.weights};
    sol[li] = solve_two_sided(inst);
  });
  Labeling out;
  out.lines.resize(n);
  for (int li = 0; li < n; ++li) {
    out.lines[li].line = li;
    if (sol[li]) {
      for (std::size_t si = 0; si < sol[li]->choice.size(); ++si)
        out.lines[li].labels.push_back(cands[li][si][sol[li]->choice[si]]);
    } else {
      out.lines[li].labels = initial.lines[li].labels;
      if (fallbacks) ++*fallbacks;
    }
  }
  finalize(out, map.style, cfg.weights);
  return out;
}

Labeling greedy_refine(const MetroMap& map, const MapCandidates& cands, const Labeling& initial,
                       const CostWeights& w) {
  Labeling cur = initial;
  for (std::size_t li = 0; li < cands.size(); ++li) {
    auto& labels = cur.lines[li].labels;
    for (std::size_t si = 0; si < labels.size(); ++si) {
      auto score = [&](const Candidate& c) {
        double v = w1(c, map.style, w);
        if (si > 0) v += w2(labels[si - 1], c, w);
        if (si + 1 < labels.size()) v += w2(c, labels[si + 1], w);
        return v;
      };
      auto valid = [&](const Candidate& c) {
        if (label_hits_any_line(c, map)) return false;
        for (std::size_t lj = 0; lj < cur.lines.size(); ++lj)
          for (std::size_t sj = 0; sj < cur.lines[lj].labels.size(); ++sj) {
            if (lj == li && sj == si) continue;
            if (labels_conflict(c, cur.lines[lj].labels[sj])) return false;
          }
        return true;
      };
      double best = score(labels[si]);
      const Candidate* pick = nullptr;
      for (const Candidate& c : cands[li][si]) {
        if (c.id == labels[si].id) continue;
        const double v = score(c);
        if (v < best && valid(c)) {
          best = v;
          pick = &c;
        }
      }
      if (pick) labels[si] = *pick;
    }
  }
  finalize(cur, map.style, w);
  return cur;
}

RunResult dyn_alg(const MetroMap& map, const PipelineConfig& cfg) {
  RunResult r;
  r.stats.algorithm = "dyn";
  auto prep = prepare(map, cfg, r.stats);
  if (!prep) return r;
  const auto t0 = Clock::now();
  Labeling l = solve_lines(map, prep->candidates, prep->initial, cfg, &r.stats.solve_fallbacks);
  r.stats.timings.solve_ms = ms_since(t0);
  r.stats.success = true;
  fill_result_stats(r.stats, map, l);
  r.labeling = std::move(l);
  return r;
}

RunResult greedy_alg(const MetroMap& map, const PipelineConfig& cfg) {
  RunResult r;
  r.stats.algorithm = "greedy";
  auto prep = prepare(map, cfg, r.stats);
  if (!prep) return r;
  const auto t0 = Clock::now();
  Labeling l = greedy_refine(map, prep->candidates, prep->initial, cfg.weights);
  r.stats.timings.solve_ms = ms_since(t0);
  r.stats.success = true;
  fill_result_stats(r.stats, map, l);
  r.labeling = std::move(l);
  return r;
}

RunResult oracle_alg(const MetroMap& map, const PipelineConfig& cfg, std::uint64_t budget) {
  RunResult r;
  r.stats.algorithm = "oracle";
  auto prep = prepare(map, cfg, r.stats);
  if (!prep) return r;
  const auto t0 = Clock::now();
  OracleOptions opts;
  opts.budget = budget;
  auto best = exact_labeling(map, prep->candidates, cfg.weights, opts);
  r.stats.timings.solve_ms = ms_since(t0);
  if (!best) {
    r.stats.failure = "no labeling over the pre-selected candidates";
    return r;
  }
  r.stats.success = true;
  fill_result_stats(r.stats, map, best->labeling);
  r.labeling = std::move(best->labeling);
  return r;
}

}  // namespace metrolabel
