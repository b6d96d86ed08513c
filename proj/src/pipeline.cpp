#include "autotest/pipeline.hpp"

#include "autotest/common.hpp"

namespace autotest {

namespace {

constexpr int kConfigVersion = 1;

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

std::filesystem::path PipelineConfig::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
}

PipelineConfig config_from_json(const json& j,
                                const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  cfg.base_dir = base_dir;
  try {
    if (!j.is_object()) throw DataError("config must be a JSON object");
    if (j.value("version", kConfigVersion) != kConfigVersion) {
      throw DataError("unsupported config version");
    }
    if (j.contains("corpus")) {
      const auto& c = j.at("corpus");
      if (c.is_string()) {
        cfg.corpus_path = c.get<std::string>();
      } else {
        read_opt(c, "path", cfg.corpus_path);
        if (c.contains("format")) {
          cfg.corpus_format = corpus_format_from_string(c.at("format").get<std::string>());
        }
        read_opt(c, "header", cfg.csv_header);
      }
    }
    for (const auto& e : j.value("embeddings", json::array())) {
      PipelineConfig::EmbeddingEntry entry;
      entry.id = e.at("id").get<std::string>();
      entry.path = e.at("path").get<std::string>();
      read_opt(e, "centroids", entry.centroids);
      cfg.embeddings.push_back(std::move(entry));
    }
    for (const auto& e : j.value("score_tables", json::array())) {
      PipelineConfig::ScoreTableEntry entry;
      entry.type = e.at("type").get<std::string>();
      entry.path = e.at("path").get<std::string>();
      read_opt(e, "default_score", entry.default_score);
      cfg.score_tables.push_back(std::move(entry));
    }
    if (j.contains("patterns")) read_opt(j.at("patterns"), "top_k", cfg.pattern_top_k);
    if (j.contains("validators")) {
      const auto& v = j.at("validators");
      if (v.is_string()) {
        if (v.get<std::string>() == "all") {
          cfg.validators = validator_names();
        } else if (v.get<std::string>() == "none") {
          cfg.validators.clear();
        } else {
          throw DataError("validators must be \"all\", \"none\" or a list");
        }
      } else {
        cfg.validators = v.get<std::vector<std::string>>();
      }
    }
    if (j.contains("random_hash")) {
      read_opt(j.at("random_hash"), "count", cfg.random_hash_count);
      read_opt(j.at("random_hash"), "seed", cfg.random_hash_seed);
    }
    if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
    if (j.contains("assess")) {
      const auto& a = j.at("assess");
      read_opt(a, "z", cfg.assess.z);
      read_opt(a, "h_min", cfg.assess.h_min);
      read_opt(a, "p_max", cfg.assess.p_max);
      read_opt(a, "c_thres", cfg.assess.c_thres);
      read_opt(a, "prune", cfg.assess.prune);
    }
    read_opt(j, "seed", cfg.seed);
    cfg.selection.seed = cfg.seed;
    if (j.contains("selection")) {
      const auto& s = j.at("selection");
      read_opt(s, "b_size", cfg.selection.b_size);
      read_opt(s, "b_fpr", cfg.selection.b_fpr);
      read_opt(s, "delta", cfg.selection.delta);
      read_opt(s, "seed", cfg.selection.seed);
      read_opt(s, "enforce_budgets", cfg.selection.enforce_budgets);
      if (s.contains("strategy")) {
        cfg.selection.strategy = strategy_from_string(s.at("strategy").get<std::string>());
      }
    }
    if (j.contains("synthetic")) {
      std::size_t n = 0;
      if (j.at("synthetic").contains("columns") &&
          !j.at("synthetic").at("columns").is_null()) {
        n = j.at("synthetic").at("columns").get<std::size_t>();
        cfg.synthetic_columns = n;
      }
    }
    if (j.contains("corpus_options")) {
      const auto& o = j.at("corpus_options");
      read_opt(o, "dedupe_values", cfg.corpus_options.dedupe_values);
      read_opt(o, "skip_numeric_columns", cfg.corpus_options.skip_numeric_columns);
      read_opt(o, "numeric_fraction", cfg.corpus_options.numeric_fraction);
      read_opt(o, "max_value_length", cfg.corpus_options.max_value_length);
    }
    read_opt(j, "output_dir", cfg.output_dir);
    read_opt(j, "workers", cfg.workers);
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path), path.parent_path());
}

json config_to_json(const PipelineConfig& cfg) {
  json emb = json::array();
  for (const auto& e : cfg.embeddings) {
    emb.push_back({{"id", e.id}, {"path", e.path}, {"centroids", e.centroids}});
  }
  json tables = json::array();
  for (const auto& t : cfg.score_tables) {
    tables.push_back({{"type", t.type}, {"path", t.path}, {"default_score", t.default_score}});
  }
  return json{
      {"version", kConfigVersion},
      {"corpus", {{"path", cfg.corpus_path},
                  {"format", cfg.corpus_format == CorpusFormat::jsonl ? "jsonl" : "csv_dir"},
                  {"header", cfg.csv_header}}},
      {"embeddings", emb},
      {"score_tables", tables},
      {"patterns", {{"top_k", cfg.pattern_top_k}}},
      {"validators", cfg.validators},
      {"random_hash", {{"count", cfg.random_hash_count}, {"seed", cfg.random_hash_seed}}},
      {"grid", grid_to_json(cfg.grid)},
      {"assess", {{"z", cfg.assess.z},
                  {"h_min", cfg.assess.h_min},
                  {"p_max", cfg.assess.p_max},
                  {"c_thres", cfg.assess.c_thres},
                  {"prune", cfg.assess.prune}}},
      {"selection", {{"b_size", cfg.selection.b_size},
                     {"b_fpr", cfg.selection.b_fpr},
                     {"delta", cfg.selection.delta},
                     {"seed", cfg.selection.seed},
                     {"strategy", std::string(to_string(cfg.selection.strategy))},
                     {"enforce_budgets", cfg.selection.enforce_budgets}}},
      {"synthetic", {{"columns", cfg.synthetic_columns ? json(*cfg.synthetic_columns)
                                                       : json(nullptr)}}},
      {"corpus_options", {{"dedupe_values", cfg.corpus_options.dedupe_values},
                          {"skip_numeric_columns", cfg.corpus_options.skip_numeric_columns},
                          {"numeric_fraction", cfg.corpus_options.numeric_fraction},
                          {"max_value_length", cfg.corpus_options.max_value_length}}},
      {"seed", cfg.seed},
  };
}

std::string config_hash(const PipelineConfig& cfg) {
  return hex64(fnv1a64(config_to_json(cfg).dump()));
}

std::uint64_t centroid_seed(const PipelineConfig& cfg) {
  return splitmix64(cfg.seed ^ 0x63656e74ULL);
}

std::uint64_t synthetic_seed(const PipelineConfig& cfg) {
  return splitmix64(cfg.seed ^ 0x73796e74ULL);
}

FunctionRegistry build_registry(const PipelineConfig& cfg,
                                const Corpus& training) {
  FunctionRegistry reg;
  for (std::size_t k = 0; k < cfg.embeddings.size(); ++k) {
    const auto& e = cfg.embeddings[k];
    auto space = std::make_shared<const EmbeddingSpace>(
        load_embedding_space(cfg.resolve(e.path), e.id));
    reg.add_all(sample_centroids(training, space, e.centroids,
                                 splitmix64(centroid_seed(cfg) + k)));
  }
  for (const auto& t : cfg.score_tables) {
    reg.add(load_score_table(cfg.resolve(t.path), t.type, t.default_score));
  }
  if (cfg.pattern_top_k > 0) reg.add_all(infer_patterns(training, cfg.pattern_top_k));
  reg.add_all(builtin_validators(cfg.validators));
  for (std::size_t k = 0; k < cfg.random_hash_count; ++k) {
    reg.add(make_random_hash_fn(splitmix64(cfg.random_hash_seed + k)));
  }
  return reg;
}

GenResult run_gen(const PipelineConfig& cfg, const Corpus& raw) {
  Corpus training = prepare_training_corpus(raw, cfg.corpus_options);
  FunctionRegistry fns = build_registry(cfg, training);
  GenResult out{std::move(training), std::move(fns), {}};
  out.assessed = assess_all(out.fns, cfg.grid, out.training, cfg.assess,
                            cfg.corpus_options, cfg.workers);
  return out;
}

GenResult run_gen(const PipelineConfig& cfg, const Corpus& raw,
                  FunctionRegistry fns) {
  GenResult out{prepare_training_corpus(raw, cfg.corpus_options), std::move(fns), {}};
  out.assessed = assess_all(out.fns, cfg.grid, out.training, cfg.assess,
                            cfg.corpus_options, cfg.workers);
  return out;
}

SelectRun run_select(const PipelineConfig& cfg, const FunctionRegistry& fns,
                     std::span<const AssessedSdc> r_all,
                     const Corpus& training) {
  SelectRun run;
  const std::size_t n = cfg.synthetic_columns.value_or(training.size());
  if (!r_all.empty() && n > 0) {
    run.synth = build_synthetic_corpus(training, n, synthetic_seed(cfg));
  }
  run.stats = compute_candidate_stats(r_all, fns, run.synth, training.size(),
                                      cfg.corpus_options, cfg.workers);
  run.selection = select_sdcs(run.stats, run.synth.size(), cfg.selection);

  run.store.config_hash = config_hash(cfg);
  run.store.config = {{"b_size", cfg.selection.b_size},
                      {"b_fpr", cfg.selection.b_fpr},
                      {"delta", cfg.selection.delta},
                      {"seed", cfg.selection.seed},
                      {"strategy", std::string(to_string(cfg.selection.strategy))},
                      {"enforce_budgets", cfg.selection.enforce_budgets}};
  for (auto i : run.selection.selected) run.store.sdcs.push_back(r_all[i].sdc);
  for (const auto& s : run.store.sdcs) {
    if (!run.store.fns.find(s.fn_id)) run.store.fns.add(fns.at(s.fn_id));
  }
  run.store.provenance = {{"lp_objective", run.selection.lp.objective},
                          {"lp_iterations", run.selection.lp.iterations},
                          {"num_selected", run.selection.selected.size()},
                          {"total_fpr", run.selection.total_fpr},
                          {"covered_synthetic", run.selection.covered},
                          {"num_synthetic", run.synth.size()},
                          {"num_candidates", r_all.size()}};
  return run;
}

std::vector<Detection> run_infer(const SdcStore& store, const Corpus& corpus,
                                 double min_confidence,
                                 const CorpusOptions& opts, unsigned workers) {
  const auto ruleset = compile_ruleset(store.sdcs, store.fns);
  return detect_corpus(ruleset, corpus, min_confidence, opts, workers);
}

json gen_summary(const PipelineConfig& cfg, const GenResult& gen,
                 std::size_t raw_columns) {
  const auto& g = gen.assessed.gates;
  return json{{"config_hash", config_hash(cfg)},
              {"raw_columns", raw_columns},
              {"training_columns", gen.training.size()},
              {"functions", gen.fns.size()},
              {"gates", {{"candidates", g.candidates},
                         {"passed_coverage", g.passed_coverage},
                         {"passed_effect_size", g.passed_effect_size},
                         {"passed_significance", g.passed_significance},
                         {"passed_confidence", g.passed_confidence},
                         {"skipped_by_subspace", g.skipped_by_subspace}}},
              {"r_all", gen.assessed.accepted.size()}};
}

}  // namespace autotest
