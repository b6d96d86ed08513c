#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autotest/synth.hpp"

namespace autotest {

enum class Strategy { coarse, fine };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

struct SelectionConfig {
  double b_size = 500;
  double b_fpr = 0.1;
  double delta = 1e-3;
  Strategy strategy = Strategy::fine;
  std::uint64_t seed = 0;
  /// Drop members after rounding until both budgets hold. Off by default:
  /// plain randomized rounding only meets the budgets in expectation.
  bool enforce_budgets = false;
};

/// max sum_j y_j
///   s.t. sum_i x_i <= b_size, sum_i fpr_i x_i <= b_fpr,
///        y_j <= sum_{i in K_j} x_i,  x, y in {0, 1}
struct IlpProblem {
  std::vector<std::string> candidate_ids;
  std::vector<double> fprs;
  std::vector<double> confidences;
  /// K_j: sorted candidate indices per synthetic column.
  std::vector<std::vector<std::uint32_t>> cover_sets;
  double b_size = 0;
  double b_fpr = 0;

  std::size_t num_candidates() const { return candidate_ids.size(); }
  std::size_t num_columns() const { return cover_sets.size(); }
};

struct LpSolution {
  /// Per candidate, clamped to [0, 1].
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// conf(C_j, R_all) for every synthetic column: the best confidence among
/// candidates detecting it, 0 when none does.
std::vector<double> column_confidences(std::span<const CandidateStats> stats,
                                       std::size_t num_synth);

IlpProblem build_css_ilp(std::span<const CandidateStats> stats,
                         std::size_t num_synth, const SelectionConfig& cfg);

/// As build_css_ilp, but K_j keeps only detectors whose confidence is within
/// cfg.delta of all_confidences[j].
IlpProblem build_fss_ilp(std::span<const CandidateStats> stats,
                         std::span<const double> all_confidences,
                         const SelectionConfig& cfg);

/// Number of columns covered by the chosen candidate indices.
std::size_t covered_columns(const IlpProblem& problem,
                            std::span<const std::uint32_t> chosen);

/// Optimal LP relaxation. Candidates outside every K_j, and candidates whose
/// columns are a subset of another's at no lower FPR, are fixed at 0 before
/// solving; columns with identical K_j share one weighted variable.
/// Throws LpError if the solver does not converge.
LpSolution solve_lp_relaxation(const IlpProblem& problem);

/// One independent draw per candidate: included iff uniform01 < x_i.
/// Returns candidate indices in ascending order.
std::vector<std::uint32_t> randomized_round(const LpSolution& solution,
                                            const IlpProblem& problem,
                                            std::uint64_t seed);

struct IlpOptimum {
  std::size_t objective = 0;
  /// Candidate indices of the optimal subset. Among equally good subsets,
  /// the one with the lexicographically smallest sorted id list.
  std::vector<std::uint32_t> chosen;
};

/// Exact optimum by enumerating all subsets. Throws std::invalid_argument
/// above 20 candidates.
IlpOptimum brute_force_ilp(const IlpProblem& problem);

/// Best confidence among `selected` candidates (indices into `stats`) that
/// detect synthetic column j; 0 if none.
double conf_of_column(std::uint32_t j, std::span<const std::uint32_t> selected,
                      std::span<const CandidateStats> stats);

/// Removes the member with the smallest marginal coverage (ties: higher FPR
/// first, then larger id) until both budgets hold.
std::vector<std::uint32_t> enforce_budgets(const IlpProblem& problem,
                                           std::vector<std::uint32_t> chosen);

struct SelectionResult {
  IlpProblem problem;
  LpSolution lp;
  /// Indices into the stats list, ascending.
  std::vector<std::uint32_t> selected;
  std::size_t covered = 0;
  double total_fpr = 0.0;
};

/// Builds the problem for cfg.strategy, solves the relaxation and rounds it.
SelectionResult select_sdcs(std::span<const CandidateStats> stats,
                            std::size_t num_synth, const SelectionConfig& cfg);

}  // namespace autotest
