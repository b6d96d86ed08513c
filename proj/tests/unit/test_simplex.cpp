#include <algorithm>
#include <cmath>

#include "autotest/common.hpp"
#include "autotest/simplex.hpp"
#include "doctest.h"

#include <functional>
#include <limits>

using namespace autotest;

constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

// Vertex enumeration: every vertex of {Az <= b, 0 <= z <= u} is the solution
// of n tight constraints. Exponential, fine for n <= 4.
double vertex_oracle(const BoundedLp& lp) {
  const std::size_t n = lp.cols;
  struct Row {
    std::vector<double> a;
    double b;
  };
  std::vector<Row> cons;
  for (std::size_t r = 0; r < lp.rows; ++r) {
    cons.push_back({std::vector<double>(lp.a.begin() + r * n, lp.a.begin() + (r + 1) * n), lp.b[r]});
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = -1.0;
    cons.push_back({e, 0.0});
    e[j] = 1.0;
    cons.push_back({e, lp.upper[j]});
  }
  double best = -1e300;
  const std::size_t m = cons.size();
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t k) {
    if (k == n) {
      std::vector<std::vector<double>> M(n, std::vector<double>(n + 1));
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) M[r][c] = cons[pick[r]].a[c];
        M[r][n] = cons[pick[r]].b;
      }
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c; r < n; ++r) if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
        if (std::abs(M[p][c]) < 1e-12) return;
        std::swap(M[p], M[c]);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == c) continue;
          const double f = M[r][c] / M[c][c];
          for (std::size_t k2 = c; k2 <= n; ++k2) M[r][k2] -= f * M[c][k2];
        }
      }
      std::vector<double> z(n);
      for (std::size_t c = 0; c < n; ++c) z[c] = M[c][n] / M[c][c];
      for (const auto& row : cons) {
        double s = 0;
        for (std::size_t c = 0; c < n; ++c) s += row.a[c] * z[c];
        if (s > row.b + 1e-9) return;
      }
      double obj = 0;
      for (std::size_t c = 0; c < n; ++c) obj += lp.c[c] * z[c];
      best = std::max(best, obj);
      return;
    }
    for (std::size_t i = start; i < m; ++i) {
      pick[k] = i;
      rec(i + 1, k + 1);
    }
  };
  rec(0, 0);
  return best;
}

BoundedLp make(std::size_t rows, std::size_t cols) {
  BoundedLp lp;
  lp.rows = rows;
  lp.cols = cols;
  lp.a.assign(rows * cols, 0.0);
  lp.b.assign(rows, 0.0);
  lp.c.assign(cols, 0.0);
  lp.upper.assign(cols, 1.0);
  return lp;
}

}  // namespace

TEST_CASE("textbook instance") {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
  auto lp = make(3, 2);
  lp.c = {3, 5};
  lp.upper = {kInf, kInf};
  lp.at(0, 0) = 1;
  lp.at(1, 1) = 2;
  lp.at(2, 0) = 3;
  lp.at(2, 1) = 2;
  lp.b = {4, 12, 18};
  const auto r = solve_bounded_lp(lp);
  CHECK(r.objective == doctest::Approx(36.0));
  CHECK(r.z[0] == doctest::Approx(2.0));
  CHECK(r.z[1] == doctest::Approx(6.0));
}

TEST_CASE("upper bounds and unboundedness") {
  auto lp = make(0, 2);
  lp.c = {1, -1};
  lp.upper = {2.5, 4};
  const auto r = solve_bounded_lp(lp);
  CHECK(r.objective == doctest::Approx(2.5));
  CHECK(r.z[1] == 0.0);

  auto un = make(1, 2);
  un.c = {1, 1};
  un.upper = {kInf, kInf};
  un.at(0, 0) = 1;
  un.at(0, 1) = -1;
  un.b = {1};
  CHECK_THROWS_AS(solve_bounded_lp(un), LpError);
}

TEST_CASE("degenerate instance terminates") {
  // Many tight rows through the origin.
  auto lp = make(6, 3);
  lp.c = {1, 1, 1};
  lp.upper = {kInf, kInf, kInf};
  const double rows[6][3] = {{1, -1, 0}, {-1, 1, 0}, {0, 1, -1}, {0, -1, 1}, {1, 0, -1}, {1, 1, 1}};
  for (int r = 0; r < 6; ++r) for (int j = 0; j < 3; ++j) lp.at(r, j) = rows[r][j];
  lp.b = {0, 0, 0, 0, 0, 3};
  const auto res = solve_bounded_lp(lp);
  CHECK(res.objective == doctest::Approx(3.0));
}

TEST_CASE("random instances match vertex enumeration") {
  Rng rng(99);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.uniform_index(4);
    const std::size_t m = rng.uniform_index(4);
    auto lp = make(m, n);
    for (auto& v : lp.a) v = rng.uniform01() < 0.3 ? 0.0 : std::round(rng.uniform01() * 8 - 2);
    for (auto& v : lp.b) v = std::round(rng.uniform01() * 6);
    for (auto& v : lp.c) v = std::round(rng.uniform01() * 10 - 3);
    for (auto& v : lp.upper) v = 1.0 + std::round(rng.uniform01() * 3);
    const auto r = solve_bounded_lp(lp);
    CHECK(r.objective == doctest::Approx(vertex_oracle(lp)).epsilon(1e-7));
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(r.z[j] >= -1e-9);
      CHECK(r.z[j] <= lp.upper[j] + 1e-9);
    }
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += lp.at(i, j) * r.z[j];
      CHECK(s <= lp.b[i] + 1e-7);
    }
  }
}
