#pragma once

// Per-column sorted distance lists for one domain function. Lets a batch
// of candidates sharing the function answer coverage and trigger queries in
// O(log n) per column.

#include <algorithm>
#include <vector>

#include "autotest/assess.hpp"
#include "autotest/common.hpp"
#include "autotest/corpus.hpp"
#include "autotest/domain_fns.hpp"

namespace autotest::detail {

struct DistanceProfile {
  std::vector<double> sorted;

  std::size_t count_within(double d_in) const {
    return static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), d_in) - sorted.begin());
  }
  bool covered(double d_in, double m) const {
    return fraction_meets(count_within(d_in), sorted.size(), m);
  }
  bool triggered(Family family, double d_out) const {
    return !sorted.empty() &&
           outside_outer_ball(family, sorted.back(), d_out);
  }
};

inline DistanceProfile make_profile(const DomainEvalFn& fn,
                                    const std::vector<NormalizedValue>& values) {
  DistanceProfile p;
  p.sorted.reserve(values.size());
  for (const auto& v : values) p.sorted.push_back(fn.distance(v));
  std::sort(p.sorted.begin(), p.sorted.end());
  return p;
}

inline std::vector<DistanceProfile> build_profiles(const DomainEvalFn& fn,
                                                   const Corpus& corpus,
                                                   const CorpusOptions& opts,
                                                   unsigned workers) {
  std::vector<DistanceProfile> out(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    out[i] = make_profile(fn, evaluation_values(corpus[i], opts));
  });
  return out;
}

}  // namespace autotest::detail
