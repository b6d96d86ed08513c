#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "autotest/candidates.hpp"
#include "autotest/corpus.hpp"
#include "autotest/domain_fns.hpp"

namespace autotest {

/// A selected ruleset ready for application. SDCs sharing (fn_id, d_in, m)
/// share one pre-condition check per column.
struct CompiledRuleset {
  struct Group {
    std::string fn_id;
    double d_in = 0.0;
    double m = 1.0;
    std::size_t fn_index = 0;
    std::vector<std::size_t> members;
  };

  std::vector<Sdc> sdcs;
  /// Functions referenced by the ruleset, sorted by id.
  std::vector<DomainEvalFn> fns;
  /// Ordered by (fn_id, d_in, m).
  std::vector<Group> groups;

  std::size_t fn_index_of(const std::string& fn_id) const;
};

/// Throws DataError when an SDC references a function missing from `fns`.
CompiledRuleset compile_ruleset(std::span<const Sdc> sdcs,
                                const FunctionRegistry& fns);

struct Detection {
  std::string column_id;
  std::size_t value_index = 0;
  std::string value;
  double confidence = 0.0;
  std::string sdc_id;
  std::string explanation;

  bool operator==(const Detection&) const = default;
};

/// "95% of column values are within 2.5 of <fn>; 'x' is at distance 7.1 > 3.5"
std::string explain(const Sdc& sdc, const DomainEvalFn& fn,
                    const std::string& value, double distance);

/// Union of the values flagged by every applicable SDC. Each flagged index
/// carries the best confidence among its flaggers (ties: smallest sdc id).
/// Sorted by confidence descending, then index. `precondition_checks`, when
/// given, is incremented once per pre-condition evaluated.
std::vector<Detection> detect_errors(const CompiledRuleset& ruleset,
                                     const Column& column,
                                     const CorpusOptions& opts = {},
                                     std::uint64_t* precondition_checks = nullptr);

/// Reference implementation that checks every SDC on its own. Same output as
/// detect_errors; used to validate the grouped evaluation.
std::vector<Detection> detect_errors_naive(
    const CompiledRuleset& ruleset, const Column& column,
    const CorpusOptions& opts = {}, std::uint64_t* precondition_checks = nullptr);

/// Per-column results concatenated in corpus order, dropping detections
/// below `min_confidence`. Numeric-dominant columns are skipped when
/// opts.skip_numeric_columns is set.
std::vector<Detection> detect_corpus(const CompiledRuleset& ruleset,
                                     const Corpus& corpus,
                                     double min_confidence = 0.0,
                                     const CorpusOptions& opts = {},
                                     unsigned workers = 1);

}  // namespace autotest
