#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "autotest/common.hpp"
#include "autotest/eval.hpp"
#include "doctest.h"

using namespace autotest;

namespace {

Detection det(const std::string& col, std::size_t idx, double conf) {
  return Detection{col, idx, "", conf, "", ""};
}

Corpus clean_corpus(std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    Column col{"c" + std::to_string(i), std::nullopt, {}};
    for (std::size_t k = 0; k < 4 + i % 3; ++k) {
      col.values.push_back("v" + std::to_string(i) + "_" + std::to_string(k));
    }
    c.add(std::move(col));
  }
  return c;
}

}  // namespace

TEST_CASE("hand PR instance") {
  GroundTruth t;
  t.dirty["a"] = {0, 1, 2};
  const std::vector<Detection> r{det("a", 0, 0.9), det("a", 1, 0.8), det("b", 0, 0.7),
                                 det("a", 2, 0.6)};
  const auto pts = pr_curve(r, t);
  REQUIRE(pts.size() == 4);
  const double p[] = {1.0, 1.0, 2.0 / 3.0, 0.75};
  const double rc[] = {1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(pts[i].precision == doctest::Approx(p[i]).epsilon(1e-12));
    CHECK(pts[i].recall == doctest::Approx(rc[i]).epsilon(1e-12));
  }
  CHECK(pr_auc(pts) == doctest::Approx(65.0 / 72.0).epsilon(1e-9));
  CHECK(f1_at_precision(pts, 0.8) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(f1_at_precision(pts, 0.74) == doctest::Approx(2 * 0.75 / 1.75));
  CHECK(f1_at_precision(pts, 1.01) == 0.0);
}

TEST_CASE("curve conventions") {
  GroundTruth t;
  t.dirty["a"] = {0, 1};
  CHECK(pr_curve({}, t).empty());
  CHECK(pr_auc(std::vector<PrPoint>{}) == 0.0);

  const std::vector<Detection> perfect{det("a", 0, 0.9), det("a", 1, 0.5)};
  const auto pts = pr_curve(perfect, t);
  for (const auto& x : pts) CHECK(x.precision == 1.0);
  CHECK(pr_auc(pts) == doctest::Approx(1.0));
  CHECK(f1_at_precision(pts) == doctest::Approx(1.0));

  const std::vector<PrPoint> mid{{0.5, 0.8, 0.5}};
  CHECK(f1_at_precision(mid) == doctest::Approx(2 * 0.8 * 0.5 / 1.3));

  // Tied confidences collapse into one point.
  const std::vector<Detection> tied{det("a", 0, 0.9), det("b", 3, 0.9), det("a", 1, 0.9)};
  const auto tp = pr_curve(tied, t);
  REQUIRE(tp.size() == 1);
  CHECK(tp[0].precision == doctest::Approx(2.0 / 3.0));
  CHECK(tp[0].recall == 1.0);

  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    std::vector<Detection> r;
    for (int i = 0; i < 30; ++i) {
      r.push_back(det("a", rng.uniform_index(4), std::round(rng.uniform01() * 10) / 10));
    }
    const auto c = pr_curve(r, t);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(c[i].precision >= 0.0);
      CHECK(c[i].precision <= 1.0);
      CHECK(c[i].recall <= 1.0);
      if (i) CHECK(c[i].recall >= c[i - 1].recall);
      if (i) CHECK(c[i].threshold < c[i - 1].threshold);
    }
    const double a = pr_auc(c);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }
}

TEST_CASE("z-score baseline") {
  const auto fn = make_pattern_fn("[a-zA-Z]+");
  Column c{"c", std::nullopt, {}};
  for (int i = 0; i < 99; ++i) c.values.push_back("abc");
  c.values.push_back("123");
  const auto all = zscore_baseline(fn, c, -std::numeric_limits<double>::infinity());
  const auto d = zscore_baseline(fn, c, 9.9);
  REQUIRE(d.size() == 1);
  CHECK(d[0].value_index == 99);
  CHECK(d[0].confidence == doctest::Approx(std::sqrt(99.0)).epsilon(1e-12));
  CHECK(zscore_baseline(fn, c, 9.96).empty());
  CHECK(zscore_baseline(fn, c, std::numeric_limits<double>::infinity()).empty());

  const Column flat{"f", std::nullopt, {"a", "b", "c"}};
  CHECK(zscore_baseline(fn, flat, -1.0).empty());
  CHECK(all.size() == 100);
}

TEST_CASE("z-score with out-of-vocabulary values") {
  auto s = std::make_shared<EmbeddingSpace>();
  s->id = "e";
  s->dimension = 1;
  s->vectors = {{"a", {0.0}}, {"b", {1.0}}, {"c", {2.0}}};
  const auto fn = make_embedding_fn(s, "a");
  const Column c{"c", std::nullopt, {"a", "b", "c", "zzz"}};
  // distances 0, 1, 2, and 2 * 2 = 4 for the unknown value
  const auto d = zscore_baseline(fn, c, -100.0);
  REQUIRE(d.size() == 4);
  const double mean = 7.0 / 4.0;
  const double sd = std::sqrt((mean * mean + 0.75 * 0.75 + 0.25 * 0.25 + 2.25 * 2.25) / 4.0);
  CHECK(d[0].value_index == 3);
  CHECK(d[0].confidence == doctest::Approx((4.0 - mean) / sd));
}

TEST_CASE("best fitting function") {
  std::vector<DomainEvalFn> fns{make_pattern_fn("\\d+"), make_pattern_fn("[a-zA-Z]+"),
                                make_score_table_fn("t", {{"abc", 1.0}})};
  const Column words{"w", std::nullopt, {"abc", "def", "1"}};
  // All three give finite distances; mean 2/3 for the table and the digit
  // pattern, 1/3 for the word pattern.
  CHECK(fns[best_fitting_fn(fns, words)].id() == "pat:[a-zA-Z]+");
  // Ties on count and mean fall back to the smaller id.
  const std::vector<DomainEvalFn> tied{make_pattern_fn("[a-zA-Z]+"), make_pattern_fn("\\d+")};
  const Column mixed{"m", std::nullopt, {"abc", "12"}};
  CHECK(tied[best_fitting_fn(tied, mixed)].id() == "pat:[a-zA-Z]+");
}

TEST_CASE("ground truth round trip") {
  GroundTruth t;
  t.dirty["x"] = {3, 1};
  t.dirty["y y"] = {0};
  CHECK(t.is_error("x", 1));
  CHECK_FALSE(t.is_error("x", 2));
  CHECK_FALSE(t.is_error("z", 0));
  CHECK(t.num_errors() == 3);
  std::stringstream ss;
  write_ground_truth(t, ss);
  CHECK(load_ground_truth(ss) == t);
  std::istringstream bad("{\"column_id\": 3}\n");
  CHECK_THROWS_AS(load_ground_truth(bad), DataError);
}

TEST_CASE("error injection") {
  const auto c = clean_corpus(10);
  const auto [same, t0] = inject_errors(c, GroundTruth{}, 0.0, 1);
  CHECK(same.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(same[i].values == c[i].values);
  CHECK(t0.num_errors() == 0);

  const auto [all, t1] = inject_errors(c, GroundTruth{}, 1.0, 1);
  CHECK(t1.num_errors() == 10);
  CHECK(t1.dirty.size() == 10);
  for (const auto& col : all) {
    const auto& idx = t1.dirty.at(col.id);
    REQUIRE(idx.size() == 1);
    const std::size_t k = *idx.begin();
    const Column* base = c.find(col.id);
    CHECK(col.values.size() == base->values.size() + 1);
    auto stripped = col.values;
    stripped.erase(stripped.begin() + static_cast<std::ptrdiff_t>(k));
    CHECK(stripped == base->values);
    // The donor value names a different column.
    CHECK(col.values[k].rfind("v" + col.id.substr(1) + "_", 0) != 0);
  }

  const auto [a, ta] = inject_errors(c, GroundTruth{}, 0.35, 9);
  const auto [b, tb] = inject_errors(c, GroundTruth{}, 0.35, 9);
  CHECK(ta == tb);
  CHECK(ta.num_errors() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);

  // Existing labels follow the insertion.
  GroundTruth pre;
  for (const auto& col : c) pre.dirty[col.id] = {col.values.size() - 1};
  const auto [d, td] = inject_errors(c, pre, 1.0, 3);
  for (const auto& col : d) {
    const auto& idx = td.dirty.at(col.id);
    CHECK(idx.size() == 2);
    const auto& last = c.find(col.id)->values.back();
    const auto at = static_cast<std::size_t>(
        std::find(col.values.begin(), col.values.end(), last) - col.values.begin());
    CHECK(idx.count(at) == 1);
  }

  CHECK_THROWS_AS(inject_errors(c, GroundTruth{}, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(inject_errors(clean_corpus(1), GroundTruth{}, 0.5, 1), DataError);
}

TEST_CASE("report evaluation and baseline ranking") {
  const auto c = clean_corpus(20);
  const auto [dirty, truth] = inject_errors(c, GroundTruth{}, 0.5, 4);
  std::vector<Detection> oracle;
  for (const auto& [col, idx] : truth.dirty) {
    for (auto i : idx) oracle.push_back(det(col, i, 1.0));
  }
  const auto m = evaluate_report(oracle, truth);
  CHECK(m.pr_auc == doctest::Approx(1.0));
  CHECK(m.f1_at_p08 == doctest::Approx(1.0));

  const std::vector<DomainEvalFn> fns{make_pattern_fn("[a-zA-Z]+\\d+_\\d+"), make_random_hash_fn(5)};
  const auto ranked = rank_zscore_baselines(fns, dirty, truth);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].metrics.pr_auc >= ranked[1].metrics.pr_auc);
  CHECK(ranked[0].name.rfind("zscore:", 0) == 0);
}
