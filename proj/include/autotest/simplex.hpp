#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace autotest {

/// maximize c.z  subject to  A z <= b,  0 <= z <= upper
/// with b >= 0, so z = 0 is feasible. A is dense row-major (rows x cols).
/// An infinite upper bound leaves the variable unbounded above.
struct BoundedLp {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> upper;

  double& at(std::size_t r, std::size_t j) { return a[r * cols + j]; }
};

struct LpResult {
  std::vector<double> z;
  double objective = 0.0;
  std::size_t iterations = 0;
};

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Primal simplex with implicit upper bounds. Dantzig pricing; switches to
/// Bland's rule after a run of degenerate pivots so it cannot cycle.
/// Throws LpError on an unbounded problem or when `max_iterations` is hit
/// (0 picks a cap proportional to the problem size).
LpResult solve_bounded_lp(const BoundedLp& lp, std::size_t max_iterations = 0);

}  // namespace autotest
