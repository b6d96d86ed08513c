#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "autotest/candidates.hpp"
#include "autotest/corpus.hpp"
#include "autotest/domain_fns.hpp"

namespace autotest {

/// Column counts of one SDC over a corpus. "Covered" means the
/// pre-condition holds; "triggered" means the post-condition is non-empty,
/// evaluated on every column regardless of coverage.
struct ContingencyTable {
  std::uint64_t covered_triggered = 0;
  std::uint64_t covered_not_triggered = 0;
  std::uint64_t notcovered_triggered = 0;
  std::uint64_t notcovered_not_triggered = 0;

  std::uint64_t coverage() const {
    return covered_triggered + covered_not_triggered;
  }
  std::uint64_t not_covered() const {
    return notcovered_triggered + notcovered_not_triggered;
  }
  std::uint64_t total() const { return coverage() + not_covered(); }

  /// Trigger rate among covered columns.
  double rho() const;
  /// Trigger rate among uncovered columns (background).
  double rho_bar() const;

  bool operator==(const ContingencyTable&) const = default;
};

struct AssessConfig {
  double z = 1.65;
  double h_min = 0.8;
  double p_max = 0.05;
  double c_thres = 0.9;
  /// Skip work for candidates whose outcome is already decided by the
  /// confidence upper bound. Never changes the result.
  bool prune = true;
};

struct AssessedSdc {
  Sdc sdc;
  ContingencyTable table;
  double h = 0.0;
  double p = 1.0;
};

// --- per-column conditions -------------------------------------------------

/// count / n >= m, the one comparison every pre-condition check goes through.
bool fraction_meets(std::size_t count, std::size_t n, double m);

/// Post-condition boundary. Continuous families flag f(v) > d_out. Binary
/// families (distance 0 or 1, outer radius 1) flag f(v) >= d_out, which is
/// what makes "does not match" fire at d_out = 1.
bool outside_outer_ball(Family family, double distance, double d_out);

bool eval_precondition(const Sdc& sdc, const DomainEvalFn& fn,
                       std::span<const NormalizedValue> values);

/// Indices of values outside the outer ball.
std::vector<std::size_t> eval_postcondition(
    const Sdc& sdc, const DomainEvalFn& fn,
    std::span<const NormalizedValue> values);

ContingencyTable build_contingency(const Sdc& sdc, const DomainEvalFn& fn,
                                   const Corpus& corpus,
                                   const CorpusOptions& opts = {});

// --- statistics ------------------------------------------------------------

struct EffectSize {
  /// |2 (asin sqrt(rho) - asin sqrt(rho_bar))|
  double h = 0.0;
  /// rho < rho_bar: triggers less in-domain than in the background.
  bool directional = false;
};

/// Throws DataError when either the covered or uncovered group is empty.
EffectSize cohens_h(const ContingencyTable& table);

/// Pearson chi-squared on the 2x2 table, no continuity correction.
/// Returns 0 when a margin is zero.
double chi_squared_statistic(const ContingencyTable& table);

/// Upper-tail p-value with df = 1. A zero margin gives p = 1.
double chi_squared_p(const ContingencyTable& table);

/// Wilson-score lower bound of the no-false-trigger rate among covered
/// columns:
///   c = 1 - (n_ct + z^2/2)/(n_c + z^2)
///         - z/(n_c + z^2) * sqrt(n_ct*n_cnt/n_c + z^2/4)
/// Throws DataError when coverage is zero.
double wilson_lower_confidence(const ContingencyTable& table, double z);

/// 1 - z^2 / (coverage + z^2): the Wilson bound with zero triggered columns.
double confidence_upper_bound(std::uint64_t coverage, double z);

/// ceil(z^2 c / (1 - c)): the least coverage whose upper bound reaches c.
std::uint64_t min_coverage_for_confidence(double c_thres, double z);

// --- batch assessment ------------------------------------------------------

/// How many candidates survived each gate, applied in this order.
struct GateCounts {
  std::size_t candidates = 0;
  std::size_t passed_coverage = 0;
  std::size_t passed_effect_size = 0;
  std::size_t passed_significance = 0;
  std::size_t passed_confidence = 0;
  /// Candidates skipped without a column scan thanks to subspace pruning.
  std::size_t skipped_by_subspace = 0;

  bool operator==(const GateCounts& o) const {
    return candidates == o.candidates &&
           passed_coverage == o.passed_coverage &&
           passed_effect_size == o.passed_effect_size &&
           passed_significance == o.passed_significance &&
           passed_confidence == o.passed_confidence;
  }
};

struct AssessResult {
  /// R_all, sorted by candidate id.
  std::vector<AssessedSdc> accepted;
  GateCounts gates;
};

/// Assesses an explicit candidate list. Every candidate's fn_id must be in
/// `fns`. Output is identical for any worker count and either prune setting.
AssessResult assess_candidates(std::span<const Sdc> candidates,
                               const FunctionRegistry& fns,
                               const Corpus& corpus, const AssessConfig& cfg,
                               const CorpusOptions& opts = {},
                               unsigned workers = 1);

/// Streams the grid over `fns` one function at a time and assesses it.
AssessResult assess_all(const FunctionRegistry& fns, const GridSpec& grid,
                        const Corpus& corpus, const AssessConfig& cfg,
                        const CorpusOptions& opts = {}, unsigned workers = 1);

}  // namespace autotest
