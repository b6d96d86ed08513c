#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "autotest/assess.hpp"
#include "autotest/corpus.hpp"
#include "autotest/domain_fns.hpp"

namespace autotest {

/// A corpus column with one value transplanted from a different column.
/// The transplanted value is presumed to be an error in its new context.
struct SynthColumn {
  std::string id;
  std::string base_column_id;
  std::string injected_value;
  std::size_t injected_index = 0;
  std::vector<std::string> values;

  Column as_column() const { return Column{id, std::nullopt, values}; }
};

/// n synthetic columns. Base column, donor column (different from base),
/// donor value and insertion position are drawn uniformly. A donor value
/// already present in the base column (after normalization) is re-drawn up
/// to 16 times before that synthetic column is skipped, so fewer than n
/// columns can come back on degenerate corpora.
std::vector<SynthColumn> build_synthetic_corpus(const Corpus& corpus,
                                                std::size_t n,
                                                std::uint64_t seed);

/// Indices into `synth` of the columns whose injected value the SDC detects:
/// the pre-condition holds on the synthetic column and the injected position
/// is in the post-condition set.
std::vector<std::uint32_t> detection_set(const Sdc& sdc,
                                         const DomainEvalFn& fn,
                                         std::span<const SynthColumn> synth,
                                         const CorpusOptions& opts = {});

/// covered_triggered / corpus_size.
double estimate_fpr(const ContingencyTable& table, std::uint64_t corpus_size);

struct CandidateStats {
  std::string sdc_id;
  /// Sorted indices into the synthetic corpus (the set D(r)).
  std::vector<std::uint32_t> detected;
  double fpr = 0.0;
  double confidence = 0.0;
};

/// Stats for every assessed SDC, in the order given. Candidates sharing a
/// function reuse one pass over the synthetic corpus.
std::vector<CandidateStats> compute_candidate_stats(
    std::span<const AssessedSdc> assessed, const FunctionRegistry& fns,
    std::span<const SynthColumn> synth, std::uint64_t corpus_size,
    const CorpusOptions& opts = {}, unsigned workers = 1);

/// Corpus JSONL of the synthetic columns plus a ground-truth sidecar of
/// {id, base_column_id, injected_index, injected_value} lines.
void write_synthetic_corpus(std::span<const SynthColumn> synth,
                            const std::filesystem::path& corpus_path,
                            const std::filesystem::path& sidecar_path);

}  // namespace autotest
