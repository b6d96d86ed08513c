#include "autotest/select.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <stdexcept>

#include "autotest/common.hpp"
#include "autotest/simplex.hpp"

namespace autotest {

std::string_view to_string(Strategy s) {
  return s == Strategy::coarse ? "coarse" : "fine";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "coarse") return Strategy::coarse;
  if (name == "fine") return Strategy::fine;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

namespace {

void check_budgets(const SelectionConfig& cfg) {
  if (!(cfg.b_size >= 0) || !(cfg.b_fpr >= 0)) {
    throw std::invalid_argument("budgets must be non-negative");
  }
}

IlpProblem empty_problem(std::span<const CandidateStats> stats,
                         std::size_t num_synth, const SelectionConfig& cfg) {
  check_budgets(cfg);
  IlpProblem p;
  p.b_size = cfg.b_size;
  p.b_fpr = cfg.b_fpr;
  p.cover_sets.resize(num_synth);
  for (const auto& s : stats) {
    p.candidate_ids.push_back(s.sdc_id);
    p.fprs.push_back(s.fpr);
    p.confidences.push_back(s.confidence);
  }
  return p;
}

template <typename Keep>
IlpProblem build_ilp(std::span<const CandidateStats> stats,
                     std::size_t num_synth, const SelectionConfig& cfg,
                     Keep keep) {
  IlpProblem p = empty_problem(stats, num_synth, cfg);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    for (std::uint32_t j : stats[i].detected) {
      if (j >= num_synth) {
        throw DataError("detection index out of range for " + stats[i].sdc_id);
      }
      if (keep(i, j)) p.cover_sets[j].push_back(static_cast<std::uint32_t>(i));
    }
  }
  return p;
}

bool fits(double used, double budget) {
  return used <= budget + 1e-12 * std::max(1.0, budget);
}

}  // namespace

std::vector<double> column_confidences(std::span<const CandidateStats> stats,
                                       std::size_t num_synth) {
  std::vector<double> conf(num_synth, 0.0);
  for (const auto& s : stats) {
    for (std::uint32_t j : s.detected) {
      if (j < num_synth) conf[j] = std::max(conf[j], s.confidence);
    }
  }
  return conf;
}

IlpProblem build_css_ilp(std::span<const CandidateStats> stats,
                         std::size_t num_synth, const SelectionConfig& cfg) {
  return build_ilp(stats, num_synth, cfg,
                   [](std::size_t, std::uint32_t) { return true; });
}

IlpProblem build_fss_ilp(std::span<const CandidateStats> stats,
                         std::span<const double> all_confidences,
                         const SelectionConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1]");
  }
  return build_ilp(stats, all_confidences.size(), cfg,
                   [&](std::size_t i, std::uint32_t j) {
                     return stats[i].confidence >=
                            all_confidences[j] - cfg.delta;
                   });
}

std::size_t covered_columns(const IlpProblem& problem,
                            std::span<const std::uint32_t> chosen) {
  std::vector<char> in(problem.num_candidates(), 0);
  for (auto i : chosen) in.at(i) = 1;
  std::size_t covered = 0;
  for (const auto& k : problem.cover_sets) {
    covered += std::any_of(k.begin(), k.end(), [&](auto i) { return in[i]; });
  }
  return covered;
}

LpSolution solve_lp_relaxation(const IlpProblem& problem) {
  const std::size_t n = problem.num_candidates();
  LpSolution sol;
  sol.x.assign(n, 0.0);

  // Merge columns with identical cover sets into weighted groups.
  std::map<std::vector<std::uint32_t>, std::size_t> group_of;
  std::vector<double> weight;
  std::vector<std::vector<std::uint32_t>> groups_of_cand(n);
  for (const auto& k : problem.cover_sets) {
    if (k.empty()) continue;
    auto [it, fresh] = group_of.try_emplace(k, weight.size());
    if (fresh) {
      weight.push_back(0.0);
      for (auto i : k) groups_of_cand[i].push_back(static_cast<std::uint32_t>(it->second));
    }
    weight[it->second] += 1.0;
  }
  for (auto& g : groups_of_cand) std::sort(g.begin(), g.end());

  // Drop candidates dominated by another with a superset of groups and no
  // higher FPR: shifting weight onto the dominator never hurts.
  std::vector<std::uint32_t> order;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!groups_of_cand[i].empty()) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    const auto sa = groups_of_cand[a].size(), sb = groups_of_cand[b].size();
    if (sa != sb) return sa > sb;
    if (problem.fprs[a] != problem.fprs[b]) return problem.fprs[a] < problem.fprs[b];
    return problem.candidate_ids[a] < problem.candidate_ids[b];
  });
  std::vector<std::vector<std::uint32_t>> kept_in_group(weight.size());
  std::vector<std::uint32_t> kept;
  for (auto c : order) {
    const auto& gc = groups_of_cand[c];
    const auto& probe = *std::min_element(
        gc.begin(), gc.end(), [&](auto a, auto b) {
          return kept_in_group[a].size() < kept_in_group[b].size();
        });
    bool dominated = false;
    for (auto k : kept_in_group[probe]) {
      if (problem.fprs[k] <= problem.fprs[c] &&
          std::includes(groups_of_cand[k].begin(), groups_of_cand[k].end(),
                        gc.begin(), gc.end())) {
        dominated = true;
        break;
      }
    }
    if (dominated) continue;
    kept.push_back(c);
    for (auto g : gc) kept_in_group[g].push_back(c);
  }
  std::sort(kept.begin(), kept.end());

  const double fpr_sum = std::accumulate(
      kept.begin(), kept.end(), 0.0,
      [&](double acc, auto i) { return acc + problem.fprs[i]; });
  const bool size_binds = static_cast<double>(kept.size()) > problem.b_size;
  const bool fpr_binds = !fits(fpr_sum, problem.b_fpr);

  if (!size_binds && !fpr_binds) {
    for (auto i : kept) sol.x[i] = 1.0;
  } else {
    const std::size_t nx = kept.size();
    const std::size_t ng = weight.size();
    std::vector<std::uint32_t> col_of(n, 0);
    for (std::size_t c = 0; c < nx; ++c) col_of[kept[c]] = static_cast<std::uint32_t>(c);

    BoundedLp lp;
    const std::size_t budget_rows = (size_binds ? 1 : 0) + (fpr_binds ? 1 : 0);
    lp.rows = budget_rows + ng;
    lp.cols = nx + ng;
    lp.a.assign(lp.rows * lp.cols, 0.0);
    lp.b.assign(lp.rows, 0.0);
    lp.c.assign(lp.cols, 0.0);
    lp.upper.assign(lp.cols, 1.0);
    std::size_t row = 0;
    if (size_binds) {
      for (std::size_t c = 0; c < nx; ++c) lp.at(row, c) = 1.0;
      lp.b[row++] = problem.b_size;
    }
    if (fpr_binds) {
      for (std::size_t c = 0; c < nx; ++c) lp.at(row, c) = problem.fprs[kept[c]];
      lp.b[row++] = problem.b_fpr;
    }
    for (std::size_t g = 0; g < ng; ++g) {
      lp.at(budget_rows + g, nx + g) = 1.0;
      lp.c[nx + g] = weight[g];
    }
    for (std::size_t c = 0; c < nx; ++c) {
      for (auto g : groups_of_cand[kept[c]]) lp.at(budget_rows + g, c) = -1.0;
    }
    const LpResult res = solve_bounded_lp(lp);
    sol.iterations = res.iterations;
    for (std::size_t c = 0; c < nx; ++c) sol.x[kept[c]] = res.z[c];
  }

  for (const auto& k : problem.cover_sets) {
    double s = 0.0;
    for (auto i : k) s += sol.x[i];
    sol.objective += std::min(1.0, s);
  }
  return sol;
}

std::vector<std::uint32_t> randomized_round(const LpSolution& solution,
                                            const IlpProblem& problem,
                                            std::uint64_t seed) {
  if (solution.x.size() != problem.num_candidates()) {
    throw std::invalid_argument("solution does not match problem");
  }
  Rng rng(seed);
  std::vector<std::uint32_t> chosen;
  for (std::uint32_t i = 0; i < solution.x.size(); ++i) {
    if (rng.uniform01() < solution.x[i]) chosen.push_back(i);
  }
  return chosen;
}

IlpOptimum brute_force_ilp(const IlpProblem& problem) {
  const std::size_t n = problem.num_candidates();
  if (n > 20) {
    throw std::invalid_argument("brute force limited to 20 candidates");
  }
  const std::size_t words = (problem.num_columns() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> bits(n, std::vector<std::uint64_t>(words, 0));
  for (std::size_t j = 0; j < problem.num_columns(); ++j) {
    for (auto i : problem.cover_sets[j]) bits[i][j / 64] |= 1ULL << (j % 64);
  }
  // rank_order[r] = candidate with the r-th smallest id.
  std::vector<std::uint32_t> rank_order(n);
  std::iota(rank_order.begin(), rank_order.end(), 0u);
  std::sort(rank_order.begin(), rank_order.end(), [&](auto a, auto b) {
    return problem.candidate_ids[a] < problem.candidate_ids[b];
  });
  auto sorted_ids = [&](std::uint32_t mask) {
    std::vector<std::string_view> ids;
    for (auto i : rank_order) {
      if (mask >> i & 1u) ids.push_back(problem.candidate_ids[i]);
    }
    return ids;
  };

  IlpOptimum best;
  std::uint32_t best_mask = 0;
  std::vector<std::uint64_t> acc(words);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<double>(std::popcount(mask)) > problem.b_size) continue;
    double fpr = 0.0;
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      fpr += problem.fprs[i];
      for (std::size_t w = 0; w < words; ++w) acc[w] |= bits[i][w];
    }
    if (!fits(fpr, problem.b_fpr)) continue;
    std::size_t covered = 0;
    for (auto w : acc) covered += static_cast<std::size_t>(std::popcount(w));
    if (covered > best.objective ||
        (covered == best.objective && mask != best_mask &&
         sorted_ids(mask) < sorted_ids(best_mask))) {
      best.objective = covered;
      best_mask = mask;
    }
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    if (best_mask >> i & 1u) best.chosen.push_back(i);
  }
  return best;
}

double conf_of_column(std::uint32_t j, std::span<const std::uint32_t> selected,
                      std::span<const CandidateStats> stats) {
  double best = 0.0;
  for (auto i : selected) {
    const auto& d = stats[i].detected;
    if (std::binary_search(d.begin(), d.end(), j)) {
      best = std::max(best, stats[i].confidence);
    }
  }
  return best;
}

std::vector<std::uint32_t> enforce_budgets(const IlpProblem& problem,
                                           std::vector<std::uint32_t> chosen) {
  std::sort(chosen.begin(), chosen.end());
  auto total_fpr = [&] {
    double s = 0.0;
    for (auto i : chosen) s += problem.fprs[i];
    return s;
  };
  while (!chosen.empty() &&
         (static_cast<double>(chosen.size()) > problem.b_size ||
          !fits(total_fpr(), problem.b_fpr))) {
    std::vector<char> in(problem.num_candidates(), 0);
    for (auto i : chosen) in[i] = 1;
    std::vector<std::size_t> sole(problem.num_candidates(), 0);
    for (const auto& k : problem.cover_sets) {
      std::size_t hits = 0;
      std::uint32_t last = 0;
      for (auto i : k) {
        if (in[i]) {
          ++hits;
          last = i;
        }
      }
      if (hits == 1) ++sole[last];
    }
    auto victim = std::min_element(chosen.begin(), chosen.end(), [&](auto a, auto b) {
      if (sole[a] != sole[b]) return sole[a] < sole[b];
      if (problem.fprs[a] != problem.fprs[b]) return problem.fprs[a] > problem.fprs[b];
      return problem.candidate_ids[a] > problem.candidate_ids[b];
    });
    chosen.erase(victim);
  }
  return chosen;
}

SelectionResult select_sdcs(std::span<const CandidateStats> stats,
                            std::size_t num_synth, const SelectionConfig& cfg) {
  SelectionResult out;
  if (cfg.strategy == Strategy::fine) {
    const auto conf = column_confidences(stats, num_synth);
    out.problem = build_fss_ilp(stats, conf, cfg);
  } else {
    out.problem = build_css_ilp(stats, num_synth, cfg);
  }
  out.lp = solve_lp_relaxation(out.problem);
  out.selected = randomized_round(out.lp, out.problem, cfg.seed);
  if (cfg.enforce_budgets) {
    out.selected = enforce_budgets(out.problem, std::move(out.selected));
  }
  out.covered = covered_columns(out.problem, out.selected);
  for (auto i : out.selected) out.total_fpr += out.problem.fprs[i];
  return out;
}

}  // namespace autotest
