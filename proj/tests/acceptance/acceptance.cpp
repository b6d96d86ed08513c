// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "autotest/assess.hpp"
#include "autotest/common.hpp"
#include "autotest/demo.hpp"
#include "autotest/eval.hpp"
#include "autotest/infer.hpp"
#include "autotest/io.hpp"
#include "autotest/pipeline.hpp"
#include "autotest/select.hpp"

using namespace autotest;
using Clock = std::chrono::steady_clock;

namespace {

const ContingencyTable kTable{10, 990, 160000, 40000};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Textbook Wilson score interval, lower end, for k successes out of n.
double wilson_textbook(double k, double n, double z) {
  const double p = k / n;
  const double z2 = z * z;
  const double centre = p + z2 / (2.0 * n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return (centre - half) / (1.0 + z2 / n);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome criterion_1() {
  const auto e = cohens_h(kTable);
  const int reps = 10000;
  volatile double sink = 0;
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) sink = sink + cohens_h(kTable).h;
  const double per_call = seconds_since(t0) / reps;
  Outcome o;
  o.pass = std::abs(e.h - 2.01) <= 0.01 && e.directional && per_call < 1e-3;
  o.detail = "h=" + fmt("%.5f", e.h) + " rho<rho_bar=" + (e.directional ? "yes" : "no") +
             " time=" + fmt("%.3g", per_call * 1e6) + "us";
  return o;
}

Outcome criterion_2() {
  const double c = wilson_lower_confidence(kTable, 1.65);
  const double oracle = wilson_textbook(990, 1000, 1.65);
  double worst = 0.0;
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    const double w = wilson_lower_confidence({0, n, 1, 1}, 1.65);
    worst = std::max(worst, std::abs(w - confidence_upper_bound(n, 1.65)));
  }
  Outcome o;
  o.pass = std::abs(c - oracle) <= 1e-9 && std::abs(c - 0.9833) < 5e-5 && worst <= 1e-15;
  o.detail = "c=" + fmt("%.8f", c) + " |c-oracle|=" + fmt("%.2g", std::abs(c - oracle)) +
             " max|c(n_ct=0)-ub| over n<=1e5=" + fmt("%.2g", worst);
  return o;
}

// Random corpus for the pruning check: a slice of the demo corpus with a
// compact function set.
struct PruneCase {
  Corpus corpus;
  FunctionRegistry fns;
  GridSpec grid;
};

PruneCase make_prune_case(std::uint64_t seed) {
  Rng rng(seed);
  DemoOptions d;
  d.columns = 100 + rng.uniform_index(101);
  d.seed = seed;
  d.min_length = 5 + rng.uniform_index(10);
  d.max_length = d.min_length + rng.uniform_index(20);
  auto demo = make_demo_data(d);
  PruneCase pc;
  pc.corpus = demo.corpus;
  pc.fns.add_all(sample_centroids(pc.corpus, demo.embedding, 4, seed));
  pc.fns.add_all(infer_patterns(pc.corpus, 8));
  pc.fns.add_all(builtin_validators());
  for (const auto& [type, scores] : demo.score_tables) pc.fns.add(make_score_table_fn(type, scores));
  pc.grid = GridSpec::defaults();
  pc.grid.m_values = {1.0, 0.9, 0.8, 0.6, 0.4};
  pc.grid.radii[Family::embedding] = RadiusGrid{{1.0, 2.0, 3.0, 5.0}, {}, {0.5, 2.0}};
  pc.grid.radii[Family::score_table] = RadiusGrid{{0.1, 0.2, 0.5}, {0.9, 1.0}, {}};
  return pc;
}

Outcome criterion_3() {
  Outcome o;
  const auto minimum = min_coverage_for_confidence(0.9, 1.65);
  bool monotone = true;
  double prev = -1.0;
  for (std::uint64_t n = 0; n <= 1000000; ++n) {
    const double ub = confidence_upper_bound(n, 1.65);
    if (ub < prev) monotone = false;
    prev = ub;
  }
  std::size_t identical = 0, max_cols = 0, max_cands = 0, nonempty = 0, skipped = 0;
  AssessConfig on, off;
  off.prune = false;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto pc = make_prune_case(1000 + s);
    max_cols = std::max(max_cols, pc.corpus.size());
    max_cands = std::max(max_cands, count_candidates(pc.fns.functions(), pc.grid));
    const auto a = assess_all(pc.fns, pc.grid, pc.corpus, on);
    const auto b = assess_all(pc.fns, pc.grid, pc.corpus, off);
    std::ostringstream ja, jb;
    write_r_all(a.accepted, ja);
    write_r_all(b.accepted, jb);
    if (ja.str() == jb.str() && a.gates == b.gates) ++identical;
    nonempty += !a.accepted.empty();
    skipped += a.gates.skipped_by_subspace;
  }
  o.pass = minimum == 25 && monotone && identical == 50 && max_cols <= 200 && max_cands <= 500 &&
           nonempty > 0 && skipped > 0;
  o.detail = "min_coverage=" + std::to_string(minimum) + " monotone=" + (monotone ? "yes" : "no") +
             " identical=" + std::to_string(identical) + "/50 (max " + std::to_string(max_cols) +
             " cols, " + std::to_string(max_cands) + " candidates; " + std::to_string(nonempty) +
             " with non-empty R_all; " + std::to_string(skipped) + " subspace skips)";
  return o;
}

struct Instance {
  std::vector<CandidateStats> stats;
  std::size_t num_synth = 0;
  SelectionConfig cfg;
};

Instance make_instance(std::uint64_t seed) {
  Rng rng(seed);
  Instance in;
  const std::size_t n = 4 + rng.uniform_index(9);
  in.num_synth = 10 + rng.uniform_index(21);
  for (std::size_t i = 0; i < n; ++i) {
    CandidateStats s;
    s.sdc_id = "r" + std::to_string(i);
    const double density = 0.05 + 0.3 * rng.uniform01();
    for (std::uint32_t j = 0; j < in.num_synth; ++j) {
      if (rng.uniform01() < density) s.detected.push_back(j);
    }
    s.fpr = 0.04 * rng.uniform01();
    s.confidence = std::round((0.9 + 0.1 * rng.uniform01()) * 100) / 100;
    in.stats.push_back(std::move(s));
  }
  in.cfg.b_size = 1 + double(rng.uniform_index(4));
  in.cfg.b_fpr = 0.02 + 0.06 * rng.uniform01();
  in.cfg.delta = 0.02;
  in.cfg.strategy = seed % 2 ? Strategy::coarse : Strategy::fine;
  return in;
}

IlpProblem build_problem(const Instance& in) {
  return in.cfg.strategy == Strategy::coarse
             ? build_css_ilp(in.stats, in.num_synth, in.cfg)
             : build_fss_ilp(in.stats, column_confidences(in.stats, in.num_synth), in.cfg);
}

struct MeanSd {
  double mean = 0, se = 0;
};

MeanSd mean_se(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= double(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / double(v.size() - 1));
  return {m, sd / std::sqrt(double(v.size()))};
}

Outcome criterion_4() {
  const auto t0 = Clock::now();
  const std::size_t trials = 20000;
  std::size_t ok_lp = 0, ok_obj = 0, ok_size = 0, ok_fpr = 0;
  double worst_ratio = 1e9;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto in = make_instance(500 + k);
    const auto p = build_problem(in);
    const auto lp = solve_lp_relaxation(p);
    const auto opt = brute_force_ilp(p);
    ok_lp += lp.objective >= double(opt.objective) - 1e-9;
    std::vector<double> obj(trials), size(trials), fpr(trials);
    parallel_for(trials, 4, [&](std::size_t t) {
      const auto r = randomized_round(lp, p, splitmix64(k * 1000003 + t));
      obj[t] = double(covered_columns(p, r));
      size[t] = double(r.size());
      double f = 0;
      for (auto i : r) f += p.fprs[i];
      fpr[t] = f;
    });
    const auto o = mean_se(obj), s = mean_se(size), f = mean_se(fpr);
    const double bound = (1.0 - 1.0 / std::exp(1.0)) * double(opt.objective);
    ok_obj += o.mean >= bound - 3 * o.se;
    ok_size += s.mean <= p.b_size + 3 * s.se;
    ok_fpr += f.mean <= p.b_fpr + 3 * f.se;
    if (opt.objective > 0) worst_ratio = std::min(worst_ratio, o.mean / double(opt.objective));
  }
  const double secs = seconds_since(t0);
  Outcome out;
  out.pass = ok_lp == 20 && ok_obj == 20 && ok_size == 20 && ok_fpr == 20 && secs < 300;
  out.detail = "LP>=OPT " + std::to_string(ok_lp) + "/20, E[obj]>=(1-1/e)OPT " +
               std::to_string(ok_obj) + "/20 (worst E[obj]/OPT=" + fmt("%.3f", worst_ratio) +
               "), E|R|<=B_size " + std::to_string(ok_size) + "/20, E[FPR]<=B_FPR " +
               std::to_string(ok_fpr) + "/20, " + std::to_string(trials) + " seeds each, " +
               fmt("%.1f", secs) + "s";
  return out;
}

Outcome criterion_5(const std::vector<CandidateStats>& pipeline_stats, std::size_t pipeline_synth) {
  std::size_t same = 0, total = 0;
  auto check = [&](std::span<const CandidateStats> stats, std::size_t m) {
    SelectionConfig cfg;
    cfg.delta = 1.0;
    same += build_fss_ilp(stats, column_confidences(stats, m), cfg).cover_sets ==
            build_css_ilp(stats, m, cfg).cover_sets;
    ++total;
  };
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto in = make_instance(500 + k);
    check(in.stats, in.num_synth);
  }
  if (!pipeline_stats.empty()) check(pipeline_stats, pipeline_synth);
  Outcome o;
  o.pass = same == total && total == 21;
  o.detail = "identical K_j on " + std::to_string(same) + "/" + std::to_string(total) +
             " instances (20 random + demo pipeline)";
  return o;
}

// Training run shared by criteria 6: a high-cardinality typed corpus with and
// without 100 random-hash functions.
Outcome criterion_6() {
  DemoOptions d;
  d.columns = 1200;
  d.seed = 31;
  d.vocabulary_domains = false;
  const auto demo = make_demo_data(d);
  const auto [train, test] = sample_columns(demo.corpus, 200, 5);
  PipelineConfig cfg;
  cfg.seed = 11;
  cfg.workers = 8;
  cfg.pattern_top_k = 40;

  auto base_fns = [&](const Corpus& training) {
    FunctionRegistry r = build_registry(cfg, training);
    for (const auto& [type, scores] : demo.score_tables) r.add(make_score_table_fn(type, scores));
    return r;
  };
  const Corpus training = prepare_training_corpus(train, cfg.corpus_options);
  auto clean = run_gen(cfg, train, base_fns(training));
  auto adv_fns = base_fns(training);
  for (std::uint64_t k = 0; k < 100; ++k) adv_fns.add(make_random_hash_fn(splitmix64(0xabcd + k)));
  auto adv = run_gen(cfg, train, std::move(adv_fns));

  std::ostringstream r1, r2;
  write_r_all(clean.assessed.accepted, r1);
  write_r_all(adv.assessed.accepted, r2);
  std::size_t hash_accepted = 0;
  for (const auto& a : adv.assessed.accepted) {
    hash_accepted += adv.fns.at(a.sdc.fn_id).family() == Family::random_hash;
  }
  const auto s1 = run_select(cfg, clean.fns, clean.assessed.accepted, clean.training);
  const auto s2 = run_select(cfg, adv.fns, adv.assessed.accepted, adv.training);
  const auto [dirty, truth] = inject_errors(test, GroundTruth{}, 0.1, 3);
  std::ostringstream rep1, rep2;
  write_report(run_infer(s1.store, dirty, 0.0, cfg.corpus_options, 4), rep1);
  write_report(run_infer(s2.store, dirty, 0.0, cfg.corpus_options, 4), rep2);
  Outcome o;
  o.pass = r1.str() == r2.str() && hash_accepted == 0 && rep1.str() == rep2.str() &&
           !clean.assessed.accepted.empty() && !rep1.str().empty();
  o.detail = "hash candidates=" + std::to_string(adv.assessed.gates.candidates - clean.assessed.gates.candidates) +
             " accepted=" + std::to_string(hash_accepted) + ", R_all " +
             (r1.str() == r2.str() ? "identical" : "differs") + " (" +
             std::to_string(clean.assessed.accepted.size()) + " SDCs), report " +
             (rep1.str() == rep2.str() ? "byte-identical" : "differs");
  return o;
}

Outcome criterion_7() {
  DemoOptions d;
  d.columns = 300;
  d.seed = 77;
  const auto demo = make_demo_data(d);
  FunctionRegistry fns;
  fns.add_all(sample_centroids(demo.corpus, demo.embedding, 6, 1));
  fns.add_all(infer_patterns(demo.corpus, 6));
  fns.add_all(builtin_validators());
  for (const auto& [type, scores] : demo.score_tables) fns.add(make_score_table_fn(type, scores));
  const auto& all = fns.functions();
  const auto [dirty, truth] = inject_errors(demo.corpus, GroundTruth{}, 0.5, 2);
  (void)truth;

  Rng rng(123);
  std::size_t equal = 0, fewer_ok = 0, with_groups = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<Sdc> rules;
    const std::size_t n = 1 + rng.uniform_index(12);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& fn = all[rng.uniform_index(all.size())];
      const double ms[] = {1.0, 0.95, 0.9, 0.8, 0.6};
      const double m = ms[rng.uniform_index(5)];
      double din = 0, dout = 1;
      if (fn.family() == Family::embedding) {
        din = 0.5 * double(1 + rng.uniform_index(12));
        dout = din + 0.5 * double(1 + rng.uniform_index(4));
      } else if (!is_binary(fn.family())) {
        din = 0.05 * double(2 + rng.uniform_index(9));
        dout = 0.9 + 0.05 * double(rng.uniform_index(3));
      }
      Sdc s{make_sdc_id(fn.id(), din, dout, m), fn.id(), din, dout, m,
            std::round(rng.uniform01() * 100) / 100};
      if (std::none_of(rules.begin(), rules.end(), [&](const Sdc& r) { return r.id == s.id; })) {
        rules.push_back(s);
      }
      // Half the time, add a sibling sharing the pre-condition.
      if (!is_binary(fn.family()) && rng.uniform01() < 0.5) {
        Sdc sib = s;
        sib.d_out = s.d_out + (fn.family() == Family::embedding ? 1.0 : 0.01);
        sib.id = make_sdc_id(sib.fn_id, sib.d_in, sib.d_out, sib.m);
        sib.confidence = std::round(rng.uniform01() * 100) / 100;
        rules.push_back(sib);
      }
    }
    const auto rs = compile_ruleset(rules, fns);
    const Column& col = dirty[rng.uniform_index(dirty.size())];
    std::uint64_t grouped = 0, naive = 0;
    equal += detect_errors(rs, col, {}, &grouped) == detect_errors_naive(rs, col, {}, &naive);
    const bool has_group = std::any_of(rs.groups.begin(), rs.groups.end(),
                                       [](const auto& g) { return g.members.size() >= 2; });
    with_groups += has_group;
    fewer_ok += has_group ? grouped < naive : grouped <= naive;
  }
  Outcome o;
  o.pass = equal == 1000 && fewer_ok == 1000 && with_groups > 0;
  o.detail = "exact match " + std::to_string(equal) + "/1000, fewer pre-condition checks on " +
             std::to_string(fewer_ok) + "/1000 (" + std::to_string(with_groups) +
             " rulesets with a shared pre-condition)";
  return o;
}

struct EndToEnd {
  Outcome result;
  std::vector<CandidateStats> stats;
  std::size_t num_synth = 0;
  std::vector<Sdc> r_all;
  FunctionRegistry fns;
  Corpus heldout;
};

EndToEnd criterion_8() {
  const auto t0 = Clock::now();
  DemoOptions d;
  d.columns = 2400;
  d.seed = 7;
  const auto demo = make_demo_data(d);
  const auto [train, heldout] = sample_columns(demo.corpus, 400, 99);
  PipelineConfig cfg;
  cfg.seed = 7;
  cfg.workers = 8;
  cfg.embeddings.clear();
  cfg.pattern_top_k = 40;
  const Corpus training = prepare_training_corpus(train, cfg.corpus_options);
  FunctionRegistry fns = build_registry(cfg, training);
  fns.add_all(sample_centroids(training, demo.embedding, 60, centroid_seed(cfg)));
  for (const auto& [type, scores] : demo.score_tables) fns.add(make_score_table_fn(type, scores));
  auto gen = run_gen(cfg, train, std::move(fns));
  const auto sel = run_select(cfg, gen.fns, gen.assessed.accepted, gen.training);

  const auto [dirty, truth] = inject_errors(heldout, GroundTruth{}, 0.1, 2024);
  const auto report = run_infer(sel.store, dirty, 0.0, cfg.corpus_options, cfg.workers);
  const auto m = evaluate_report(report, truth);
  const auto baselines = rank_zscore_baselines(gen.fns.functions(), dirty, truth,
                                               cfg.corpus_options, cfg.workers);
  const double secs = seconds_since(t0);
  const double top_p = m.points.empty() ? 0.0 : m.points.front().precision;
  const double top_r = m.points.empty() ? 0.0 : m.points.front().recall;
  const double best_base = baselines.empty() ? 0.0 : baselines.front().metrics.pr_auc;

  EndToEnd e;
  e.result.pass = top_p >= 0.8 && top_r > 0.0 && m.pr_auc > best_base && secs < 900;
  e.result.detail = std::to_string(train.size()) + " train / " + std::to_string(heldout.size()) +
                    " held-out cols, " + std::to_string(truth.num_errors()) + " injected errors, " +
                    std::to_string(sel.store.sdcs.size()) + " SDCs selected; top band P=" +
                    fmt("%.3f", top_p) + " R=" + fmt("%.3f", top_r) + "; PR-AUC=" +
                    fmt("%.3f", m.pr_auc) + " F1@P0.8=" + fmt("%.3f", m.f1_at_p08) +
                    " vs best baseline " + (baselines.empty() ? "none" : baselines.front().name) +
                    " PR-AUC=" + fmt("%.3f", best_base) + "; " + fmt("%.1f", secs) + "s";
  e.stats = sel.stats;
  e.num_synth = sel.synth.size();
  for (const auto& a : gen.assessed.accepted) e.r_all.push_back(a.sdc);
  e.fns = gen.fns;
  e.heldout = dirty;
  return e;
}

Outcome criterion_9() {
  GroundTruth t;
  t.dirty["a"] = {0, 1, 2};
  const std::vector<Detection> perfect{{"a", 0, "", 0.9, "", ""}, {"a", 1, "", 0.8, "", ""},
                                       {"a", 2, "", 0.7, "", ""}};
  const double auc_perfect = pr_auc(pr_curve(perfect, t));
  const std::vector<Detection> weak{{"b", 0, "", 0.9, "", ""}, {"a", 0, "", 0.8, "", ""},
                                    {"b", 1, "", 0.7, "", ""}};
  const double f1_weak = f1_at_precision(pr_curve(weak, t), 0.8);
  const std::vector<Detection> hand{{"a", 0, "", 0.9, "", ""}, {"a", 1, "", 0.8, "", ""},
                                    {"b", 0, "", 0.7, "", ""}, {"a", 2, "", 0.6, "", ""}};
  const auto pts = pr_curve(hand, t);
  const double want_p[] = {1.0, 1.0, 2.0 / 3.0, 0.75};
  const double want_r[] = {1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0};
  bool points_ok = pts.size() == 4;
  for (std::size_t i = 0; points_ok && i < 4; ++i) {
    points_ok = std::abs(pts[i].precision - want_p[i]) <= 1e-9 &&
                std::abs(pts[i].recall - want_r[i]) <= 1e-9;
  }
  const double auc_hand = pr_auc(pts);
  Outcome o;
  o.pass = auc_perfect == 1.0 && f1_weak == 0.0 && points_ok &&
           std::abs(auc_hand - 65.0 / 72.0) <= 1e-9;
  o.detail = "perfect PR-AUC=" + fmt("%.3f", auc_perfect) + ", F1@P0.8 with no qualifying point=" +
             fmt("%.3f", f1_weak) + ", hand curve " + (points_ok ? "matches" : "differs") +
             ", hand PR-AUC=" + fmt("%.12f", auc_hand) + " (want 65/72)";
  return o;
}

Outcome criterion_10(const EndToEnd& e) {
  std::vector<Sdc> rules = e.r_all;
  std::sort(rules.begin(), rules.end(), [](const Sdc& a, const Sdc& b) {
    return a.confidence != b.confidence ? a.confidence > b.confidence : a.id < b.id;
  });
  if (rules.size() > 500) rules.resize(500);
  const auto rs = compile_ruleset(rules, e.fns);
  std::size_t columns = 0, detections = 0;
  const auto t0 = Clock::now();
  for (const auto& col : e.heldout) {
    detections += detect_errors(rs, col).size();
    ++columns;
  }
  const double mean = seconds_since(t0) / double(std::max<std::size_t>(columns, 1));
  Outcome o;
  o.pass = rules.size() == 500 && mean < 0.2;
  o.detail = std::to_string(rules.size()) + " SDCs in " + std::to_string(rs.groups.size()) +
             " pre-condition groups, " + std::to_string(columns) + " columns, mean " +
             fmt("%.3g", mean * 1e3) + " ms/column, " + std::to_string(detections) + " detections";
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "cohens_h", criterion_1);
  report(2, "wilson_lower_bound", criterion_2);
  report(3, "pruning", criterion_3);
  report(4, "selection_guarantees", criterion_4);
  EndToEnd e2e;
  bool e2e_ok = true;
  try {
    e2e = criterion_8();
  } catch (const std::exception& ex) {
    e2e_ok = false;
    e2e.result = {false, std::string("exception: ") + ex.what()};
  }
  report(5, "fss_degeneration", [&] { return criterion_5(e2e.stats, e2e.num_synth); });
  report(6, "random_hash_robustness", criterion_6);
  report(7, "inference_equivalence", criterion_7);
  report(8, "end_to_end", [&] { return e2e.result; });
  report(9, "metrics", criterion_9);
  report(10, "inference_latency", [&] {
    return e2e_ok ? criterion_10(e2e) : Outcome{false, "end-to-end run failed"};
  });
  return failed == 0 ? 0 : 1;
}
