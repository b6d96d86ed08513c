#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autotest/corpus.hpp"
#include "autotest/domain_fns.hpp"
#include "autotest/infer.hpp"

namespace autotest {

/// Erroneous value indices per column id. Columns absent from the map (or
/// mapped to an empty set) are clean.
struct GroundTruth {
  std::map<std::string, std::set<std::size_t>> dirty;

  bool is_error(const std::string& column_id, std::size_t index) const;
  std::size_t num_errors() const;
  bool operator==(const GroundTruth&) const = default;
};

GroundTruth load_ground_truth(std::istream& in);
GroundTruth load_ground_truth(const std::filesystem::path& path);
/// One line {"column_id": str, "indices": [int]} per dirty column.
void write_ground_truth(const GroundTruth& truth, std::ostream& out);
void write_ground_truth(const GroundTruth& truth,
                        const std::filesystem::path& path);

/// floor(rate * |corpus|) columns, chosen uniformly, each receive one value
/// taken from another column at a uniform position. Existing labels shift
/// with the insertion. Throws std::invalid_argument when rate is outside
/// [0, 1] and DataError when rate > 0 on fewer than 2 columns.
std::pair<Corpus, GroundTruth> inject_errors(const Corpus& corpus,
                                             const GroundTruth& truth,
                                             double rate, std::uint64_t seed);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;

  bool operator==(const PrPoint&) const = default;
};

/// One point per distinct confidence, thresholds descending (so recall is
/// non-decreasing). Detections are matched to truth by (column, index).
std::vector<PrPoint> pr_curve(std::span<const Detection> report,
                              const GroundTruth& truth);

/// Trapezoidal area over recall, starting from (0, precision of the first
/// point). Points must be in pr_curve order.
double pr_auc(std::span<const PrPoint> points);

/// F1 of the highest-recall point with precision >= p0; 0 if none.
double f1_at_precision(std::span<const PrPoint> points, double p0 = 0.8);

/// Values whose z-score of f(v) within the column exceeds z_thresh. The
/// z-score is the detection confidence. Infinite distances (out of
/// vocabulary) are replaced by twice the column's largest finite distance,
/// or 1 when there is none. Zero spread flags nothing.
std::vector<Detection> zscore_baseline(const DomainEvalFn& fn,
                                       const Column& column, double z_thresh,
                                       const CorpusOptions& opts = {});

/// Index of the function in `fns` that fits the column best: most values at
/// finite distance, then smallest mean finite distance, then smallest id.
std::size_t best_fitting_fn(std::span<const DomainEvalFn> fns,
                            const Column& column,
                            const CorpusOptions& opts = {});

/// Z-score baseline over a corpus: each column is scored with its
/// best-fitting function among `fns`, with z_thresh -infinity so the full
/// ranking is kept for curve sweeping. Numeric-dominant columns are skipped
/// when opts.skip_numeric_columns is set.
std::vector<Detection> zscore_report(std::span<const DomainEvalFn> fns,
                                     const Corpus& corpus,
                                     const CorpusOptions& opts = {},
                                     unsigned workers = 1);

struct Metrics {
  double pr_auc = 0.0;
  double f1_at_p08 = 0.0;
  std::vector<PrPoint> points;
};

Metrics evaluate_report(std::span<const Detection> report,
                        const GroundTruth& truth);

struct BaselineScore {
  std::string name;
  Metrics metrics;
};

/// One z-score baseline per family present in `fns` (named
/// "zscore:<family>"), best PR-AUC first; ties keep family order.
std::vector<BaselineScore> rank_zscore_baselines(
    std::span<const DomainEvalFn> fns, const Corpus& corpus,
    const GroundTruth& truth, const CorpusOptions& opts = {},
    unsigned workers = 1);

}  // namespace autotest
