// sdc: command-line driver for the constraint learning pipeline.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "autotest/common.hpp"
#include "autotest/demo.hpp"
#include "autotest/eval.hpp"
#include "autotest/io.hpp"
#include "autotest/pipeline.hpp"
#include "autotest/simplex.hpp"

namespace fs = std::filesystem;
using namespace autotest;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string config;
};

PipelineConfig effective_config(const Globals& g) {
  PipelineConfig cfg = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.selection.seed = *g.seed;
  }
  if (g.workers) cfg.workers = *g.workers;
  return cfg;
}

Corpus read_corpus(const fs::path& path, const std::string& format, bool header) {
  return load_corpus(path, corpus_format_from_string(format), header);
}

template <typename W>
std::string render(W&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

const CLI::IsMember kFormats({"jsonl", "csv_dir", "csv-dir"});

void log(const std::string& msg) { std::cerr << "sdc: " << msg << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn semantic-domain constraints from a table corpus and use "
               "them to flag erroneous cell values."};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Global random seed");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "Pipeline config JSON")->check(CLI::ExistingFile);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate and assess candidate constraints (writes R_all)");
  std::string gen_corpus, gen_format, gen_out;
  gen->add_option("--corpus", gen_corpus, "Training corpus (overrides config)");
  gen->add_option("--format", gen_format, "jsonl | csv_dir")->check(kFormats);
  gen->add_option("--out-dir", gen_out, "Output directory (overrides config)");

  // select
  auto* sel = app.add_subcommand("select", "Select a constraint set from R_all");
  std::string sel_rall, sel_fns, sel_corpus, sel_format, sel_out, sel_strategy, sel_synth,
      sel_dir;
  std::optional<double> sel_bsize, sel_bfpr, sel_delta;
  bool sel_enforce = false;
  sel->add_option("--out-dir", sel_dir, "Directory holding gen output (overrides config)");
  sel->add_option("--r-all", sel_rall, "R_all JSONL (default <out-dir>/r_all.jsonl)");
  sel->add_option("--functions", sel_fns, "Function manifest (default <out-dir>/functions.json)");
  sel->add_option("--corpus", sel_corpus, "Training corpus (overrides config)");
  sel->add_option("--format", sel_format, "jsonl | csv_dir")->check(kFormats);
  sel->add_option("--strategy", sel_strategy, "fine | coarse")
      ->check(CLI::IsMember({"fine", "coarse"}));
  sel->add_option("--b-size", sel_bsize, "Size budget")->check(CLI::NonNegativeNumber);
  sel->add_option("--b-fpr", sel_bfpr, "False-positive budget")->check(CLI::NonNegativeNumber);
  sel->add_option("--delta", sel_delta, "Fine-select confidence slack, in (0, 1]");
  sel->add_flag("--enforce-budgets", sel_enforce,
                "Drop members after rounding until both budgets hold");
  sel->add_option("--out", sel_out, "SDC store (default <out-dir>/store.json)");
  sel->add_option("--synthetic-out", sel_synth,
                  "Directory for the synthetic corpus and its ground truth");

  // infer
  auto* inf = app.add_subcommand("infer", "Apply a constraint store to a corpus");
  std::string inf_rules, inf_corpus, inf_format = "jsonl", inf_out;
  double inf_min = 0.0;
  inf->add_option("--rules", inf_rules, "SDC store JSON")->required()->check(CLI::ExistingFile);
  inf->add_option("--corpus", inf_corpus, "Corpus to check")->required();
  inf->add_option("--format", inf_format, "jsonl | csv_dir")->check(kFormats);
  inf->add_option("--min-confidence", inf_min, "Drop detections below this confidence");
  inf->add_option("--out", inf_out, "Report JSONL (default stdout)");

  // inject
  auto* inj = app.add_subcommand("inject", "Inject foreign values into a corpus");
  std::string inj_corpus, inj_format = "jsonl", inj_truth, inj_out, inj_truth_out;
  double inj_rate = 0.1;
  inj->add_option("--corpus", inj_corpus, "Input corpus")->required();
  inj->add_option("--format", inj_format, "jsonl | csv_dir")->check(kFormats);
  inj->add_option("--truth", inj_truth, "Existing ground truth JSONL");
  inj->add_option("--rate", inj_rate, "Fraction of columns to corrupt")
      ->check(CLI::Range(0.0, 1.0));
  inj->add_option("--out", inj_out, "Output corpus JSONL")->required();
  inj->add_option("--truth-out", inj_truth_out, "Output ground truth JSONL")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Score a report against ground truth");
  std::string b_report, b_truth, b_out, b_csv, b_fns, b_corpus, b_format = "jsonl";
  bench->add_option("--report", b_report, "Report JSONL")->required()->check(CLI::ExistingFile);
  bench->add_option("--truth", b_truth, "Ground truth JSONL")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", b_out, "Metrics JSON (default stdout)");
  bench->add_option("--csv", b_csv, "Also write PR points as CSV");
  bench->add_option("--baseline-functions", b_fns,
                    "Function manifest for z-score baselines (needs --corpus)");
  bench->add_option("--corpus", b_corpus, "Corpus the report was produced on");
  bench->add_option("--format", b_format, "jsonl | csv_dir")->check(kFormats);

  // demo-data
  auto* demo = app.add_subcommand("demo-data", "Write a synthetic typed corpus, embeddings and config");
  std::string demo_out;
  std::size_t demo_cols = 2000;
  bool demo_formatted_only = false;
  demo->add_option("--out-dir", demo_out, "Output directory")->required();
  demo->add_option("--columns", demo_cols, "Number of columns");
  demo->add_flag("--formatted-only", demo_formatted_only,
                 "Skip the small-vocabulary word domains");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      PipelineConfig cfg = effective_config(g);
      if (!gen_corpus.empty()) cfg.corpus_path = fs::absolute(gen_corpus).string();
      if (!gen_format.empty()) cfg.corpus_format = corpus_format_from_string(gen_format);
      if (!gen_out.empty()) cfg.output_dir = fs::absolute(gen_out).string();
      if (cfg.corpus_path.empty()) throw UsageError("gen needs --corpus or a config with corpus.path");
      const fs::path out_dir = cfg.resolve(cfg.output_dir);
      const Corpus raw = load_corpus(cfg.resolve(cfg.corpus_path), cfg.corpus_format, cfg.csv_header);
      const GenResult res = run_gen(cfg, raw);
      write_text_file(out_dir / "r_all.jsonl",
                      render([&](auto& o) { write_r_all(res.assessed.accepted, o); }));
      write_text_file(out_dir / "functions.json",
                      functions_to_json(res.fns.functions()).dump(2) + "\n");
      const json summary = gen_summary(cfg, res, raw.size());
      write_text_file(out_dir / "gen_summary.json", summary.dump(2) + "\n");
      log("R_all has " + std::to_string(res.assessed.accepted.size()) + " of " +
          std::to_string(res.assessed.gates.candidates) + " candidates");
    } else if (sel->parsed()) {
      PipelineConfig cfg = effective_config(g);
      if (!sel_corpus.empty()) cfg.corpus_path = fs::absolute(sel_corpus).string();
      if (!sel_format.empty()) cfg.corpus_format = corpus_format_from_string(sel_format);
      if (!sel_strategy.empty()) cfg.selection.strategy = strategy_from_string(sel_strategy);
      if (sel_bsize) cfg.selection.b_size = *sel_bsize;
      if (sel_bfpr) cfg.selection.b_fpr = *sel_bfpr;
      if (sel_delta) cfg.selection.delta = *sel_delta;
      if (sel_enforce) cfg.selection.enforce_budgets = true;
      if (cfg.corpus_path.empty()) throw UsageError("select needs --corpus or a config with corpus.path");
      if (!sel_dir.empty()) cfg.output_dir = fs::absolute(sel_dir).string();
      const fs::path out_dir = cfg.resolve(cfg.output_dir);
      const fs::path rall_path = sel_rall.empty() ? out_dir / "r_all.jsonl" : fs::path(sel_rall);
      const fs::path fns_path = sel_fns.empty() ? out_dir / "functions.json" : fs::path(sel_fns);
      const fs::path out_path = sel_out.empty() ? out_dir / "store.json" : fs::path(sel_out);

      std::ifstream rall_in(rall_path);
      if (!rall_in) throw DataError("cannot open " + rall_path.string());
      const auto r_all = read_r_all(rall_in);
      const auto fns = functions_from_json(read_json_file(fns_path), fns_path.parent_path());
      const Corpus raw = load_corpus(cfg.resolve(cfg.corpus_path), cfg.corpus_format, cfg.csv_header);
      const Corpus training = prepare_training_corpus(raw, cfg.corpus_options);
      const SelectRun run = run_select(cfg, fns, r_all, training);
      write_text_file(out_path, store_to_json(run.store).dump(2) + "\n");
      if (!sel_synth.empty()) {
        fs::create_directories(sel_synth);
        write_synthetic_corpus(run.synth, fs::path(sel_synth) / "synthetic.jsonl",
                               fs::path(sel_synth) / "synthetic_truth.jsonl");
      }
      log("selected " + std::to_string(run.store.sdcs.size()) + " constraints, LP objective " +
          format_real(run.selection.lp.objective));
    } else if (inf->parsed()) {
      const PipelineConfig cfg = effective_config(g);
      const SdcStore store = store_from_json(read_json_file(inf_rules), fs::path(inf_rules).parent_path());
      const Corpus corpus = read_corpus(inf_corpus, inf_format, cfg.csv_header);
      const auto report = run_infer(store, corpus, inf_min, cfg.corpus_options, cfg.workers);
      const std::string text = render([&](auto& o) { write_report(report, o); });
      if (inf_out.empty()) {
        std::cout << text;
      } else {
        write_text_file(inf_out, text);
      }
      log(std::to_string(report.size()) + " detections");
    } else if (inj->parsed()) {
      const PipelineConfig cfg = effective_config(g);
      const Corpus corpus = read_corpus(inj_corpus, inj_format, cfg.csv_header);
      const GroundTruth truth = inj_truth.empty() ? GroundTruth{} : load_ground_truth(fs::path(inj_truth));
      const auto [dirty, new_truth] = inject_errors(corpus, truth, inj_rate, cfg.seed);
      write_text_file(inj_out, render([&](auto& o) { write_corpus_jsonl(dirty, o); }));
      write_text_file(inj_truth_out, render([&](auto& o) { write_ground_truth(new_truth, o); }));
    } else if (bench->parsed()) {
      const PipelineConfig cfg = effective_config(g);
      std::ifstream rin(b_report);
      const auto report = read_report(rin);
      const GroundTruth truth = load_ground_truth(fs::path(b_truth));
      const Metrics m = evaluate_report(report, truth);
      json out = metrics_to_json(m);
      if (!b_fns.empty()) {
        if (b_corpus.empty()) throw UsageError("--baseline-functions needs --corpus");
        const auto fns = functions_from_json(read_json_file(b_fns), fs::path(b_fns).parent_path());
        const Corpus corpus = read_corpus(b_corpus, b_format, cfg.csv_header);
        json baselines = json::array();
        for (const auto& b : rank_zscore_baselines(fns.functions(), corpus, truth,
                                                   cfg.corpus_options, cfg.workers)) {
          baselines.push_back({{"name", b.name},
                               {"pr_auc", b.metrics.pr_auc},
                               {"f1_at_p08", b.metrics.f1_at_p08}});
        }
        out["baselines"] = baselines;
      }
      if (b_out.empty()) {
        std::cout << out.dump(2) << '\n';
      } else {
        write_text_file(b_out, out.dump(2) + "\n");
      }
      if (!b_csv.empty()) {
        write_text_file(b_csv, render([&](auto& o) { write_pr_csv(m.points, o); }));
      }
    } else if (demo->parsed()) {
      DemoOptions opts;
      opts.columns = demo_cols;
      opts.vocabulary_domains = !demo_formatted_only;
      if (g.seed) opts.seed = *g.seed;
      write_demo_files(make_demo_data(opts), demo_out);
    }
  } catch (const UsageError& e) {
    log(e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    log(e.what());
    return 1;
  } catch (const DataError& e) {
    log(std::string("data error: ") + e.what());
    return 2;
  } catch (const std::exception& e) {
    log(std::string("internal error: ") + e.what());
    return 3;
  }
  return 0;
}
