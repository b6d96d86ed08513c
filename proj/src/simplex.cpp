#include "autotest/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace autotest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr double kStepTol = 1e-12;
constexpr std::size_t kDegenerateRun = 50;

enum class Status : unsigned char { basic, lower, upper };

}  // namespace

LpResult solve_bounded_lp(const BoundedLp& lp, std::size_t max_iterations) {
  const std::size_t m = lp.rows;
  const std::size_t n = lp.cols;
  if (lp.a.size() != m * n || lp.b.size() != m || lp.c.size() != n ||
      lp.upper.size() != n) {
    throw LpError("malformed LP dimensions");
  }
  for (double bi : lp.b) {
    if (!(bi >= 0.0)) throw LpError("LP right-hand side must be non-negative");
  }
  for (double u : lp.upper) {
    if (!(u >= 0.0)) throw LpError("LP upper bounds must be non-negative");
  }

  // Columns 0..n-1 structural, n..n+m-1 slacks.
  const std::size_t width = n + m;
  std::vector<double> t(m * width, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    std::copy_n(lp.a.begin() + static_cast<std::ptrdiff_t>(r * n), n,
                t.begin() + static_cast<std::ptrdiff_t>(r * width));
    t[r * width + n + r] = 1.0;
  }
  std::vector<double> upper(lp.upper);
  upper.resize(width, kInf);
  std::vector<double> d(lp.c);
  d.resize(width, 0.0);
  std::vector<double> beta(lp.b);
  std::vector<std::size_t> basis(m);
  std::vector<Status> status(width, Status::lower);
  for (std::size_t r = 0; r < m; ++r) {
    basis[r] = n + r;
    status[n + r] = Status::basic;
  }

  if (max_iterations == 0) max_iterations = 200 * (width + 10);
  LpResult res;
  bool bland = false;
  std::size_t degenerate = 0;

  for (;;) {
    if (res.iterations >= max_iterations) {
      throw LpError("simplex did not converge within " +
                    std::to_string(max_iterations) + " iterations");
    }

    std::size_t q = width;
    double best = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      double gain = 0.0;
      if (status[j] == Status::lower && d[j] > kCostTol) gain = d[j];
      if (status[j] == Status::upper && d[j] < -kCostTol) gain = -d[j];
      if (gain == 0.0) continue;
      if (bland) {
        q = j;
        break;
      }
      if (gain > best) {
        best = gain;
        q = j;
      }
    }
    if (q == width) break;
    ++res.iterations;

    const double dir = status[q] == Status::lower ? 1.0 : -1.0;
    double step = upper[q];
    std::size_t leave = m;
    bool leave_to_upper = false;
    double leave_alpha = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double alpha = t[r * width + q] * dir;
      double limit;
      bool to_upper;
      if (alpha > kPivotTol) {
        limit = std::max(beta[r], 0.0) / alpha;
        to_upper = false;
      } else if (alpha < -kPivotTol && upper[basis[r]] < kInf) {
        limit = std::max(upper[basis[r]] - beta[r], 0.0) / -alpha;
        to_upper = true;
      } else {
        continue;
      }
      bool take = false;
      if (limit < step - kStepTol) {
        take = true;
      } else if (limit <= step + kStepTol && leave < m) {
        take = bland ? basis[r] < basis[leave]
                     : std::abs(alpha) > std::abs(leave_alpha);
      }
      if (take) {
        step = std::min(step, limit);
        leave = r;
        leave_to_upper = to_upper;
        leave_alpha = alpha;
      }
    }
    if (!(step < kInf)) throw LpError("LP is unbounded");

    if (step <= kStepTol) {
      if (++degenerate >= kDegenerateRun) bland = true;
    } else {
      degenerate = 0;
    }

    for (std::size_t r = 0; r < m; ++r) {
      beta[r] -= t[r * width + q] * dir * step;
    }
    res.objective += std::abs(d[q]) * step;

    if (leave == m) {
      status[q] = status[q] == Status::lower ? Status::upper : Status::lower;
      continue;
    }

    const double entering_value =
        (status[q] == Status::lower ? 0.0 : upper[q]) + dir * step;
    const std::size_t out = basis[leave];
    status[out] = leave_to_upper ? Status::upper : Status::lower;

    double* prow = &t[leave * width];
    const double piv = prow[q];
    for (std::size_t j = 0; j < width; ++j) prow[j] /= piv;
    prow[q] = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == leave) continue;
      double* row = &t[r * width];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double fd = d[q];
    for (std::size_t j = 0; j < width; ++j) d[j] -= fd * prow[j];
    d[q] = 0.0;

    basis[leave] = q;
    status[q] = Status::basic;
    beta[leave] = entering_value;
  }

  res.z.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (status[j] == Status::upper) res.z[j] = upper[j];
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) res.z[basis[r]] = beta[r];
  }
  for (std::size_t j = 0; j < n; ++j) {
    res.z[j] = std::clamp(res.z[j], 0.0, upper[j]);
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += lp.c[j] * res.z[j];
  return res;
}

}  // namespace autotest
