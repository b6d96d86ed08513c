#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autotest/domain_fns.hpp"

namespace autotest {

/// A semantic-domain constraint: the pre-condition holds on a column when
/// at least a fraction m of its values satisfy f(v) <= d_in; the
/// post-condition flags values with f(v) > d_out. `confidence` is filled in
/// by assessment.
struct Sdc {
  std::string id;
  std::string fn_id;
  double d_in = 0.0;
  double d_out = 0.0;
  double m = 1.0;
  double confidence = 0.0;

  bool operator==(const Sdc&) const = default;
};

/// Content hash of (fn_id, d_in, d_out, m); stable across runs.
std::string make_sdc_id(const std::string& fn_id, double d_in, double d_out,
                        double m);

/// Radius lists for one family. When `d_out_offsets` is non-empty each d_in
/// pairs with d_in + offset; otherwise with every entry of `d_out`.
struct RadiusGrid {
  std::vector<double> d_in;
  std::vector<double> d_out;
  std::vector<double> d_out_offsets;
};

struct GridSpec {
  std::vector<double> m_values;
  std::map<Family, RadiusGrid> radii;

  /// m in {1.0, 0.95, 0.9, 0.85, 0.8}; embedding d_in 0.5..8.0 step 0.5 with
  /// d_out = d_in + {0.5, 1, 1.5, 2}; score-table and random-hash d_in
  /// 0.1..0.5 step 0.05 with d_out in {0.9, 0.95, 0.99, 1.0}.
  static GridSpec defaults();
};

/// Evenly stepped list from `first` towards `last` inclusive, each entry
/// rounded to 1e-9 so decimal steps land on the nearest double.
std::vector<double> stepped(double first, double last, double step);

/// The (d_in, d_out) pairs emitted for a family, in grid order. Binary
/// families always yield exactly {(0, 1)}.
std::vector<std::pair<double, double>> radius_pairs(Family family,
                                                    const GridSpec& grid);

std::size_t count_candidates(std::span<const DomainEvalFn> fns,
                             const GridSpec& grid);

/// Lazily walks fn x (d_in, d_out) x m. Functions are visited in ascending id
/// order; within a function the grid order above is kept.
class CandidateStream {
 public:
  CandidateStream(std::span<const DomainEvalFn> fns, GridSpec grid);

  std::optional<Sdc> next();

 private:
  void load_pairs();

  std::vector<const DomainEvalFn*> fns_;
  GridSpec grid_;
  std::size_t fn_pos_ = 0;
  std::vector<std::pair<double, double>> pairs_;
  std::size_t pair_pos_ = 0;
  std::size_t m_pos_ = 0;
};

}  // namespace autotest
