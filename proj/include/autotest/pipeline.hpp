#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autotest/assess.hpp"
#include "autotest/candidates.hpp"
#include "autotest/corpus.hpp"
#include "autotest/domain_fns.hpp"
#include "autotest/infer.hpp"
#include "autotest/io.hpp"
#include "autotest/select.hpp"
#include "autotest/synth.hpp"

namespace autotest {

struct PipelineConfig {
  struct EmbeddingEntry {
    std::string id;
    std::string path;
    std::size_t centroids = 50;
  };
  struct ScoreTableEntry {
    std::string type;
    std::string path;
    double default_score = 0.0;
  };

  /// Directory relative paths resolve against (the config file's directory).
  std::filesystem::path base_dir;

  std::string corpus_path;
  CorpusFormat corpus_format = CorpusFormat::jsonl;
  bool csv_header = true;
  std::vector<EmbeddingEntry> embeddings;
  std::vector<ScoreTableEntry> score_tables;
  std::size_t pattern_top_k = 40;
  std::vector<std::string> validators = validator_names();
  std::size_t random_hash_count = 0;
  std::uint64_t random_hash_seed = 0;
  GridSpec grid = GridSpec::defaults();
  AssessConfig assess;
  SelectionConfig selection;
  /// Synthetic columns for distant supervision; default one per column.
  std::optional<std::size_t> synthetic_columns;
  CorpusOptions corpus_options;
  std::string output_dir = "out";
  unsigned workers = 1;
  std::uint64_t seed = 0;

  std::filesystem::path resolve(const std::string& p) const;
};

/// Missing keys keep their defaults. Throws DataError on malformed values.
/// The selection seed follows "seed" unless "selection.seed" is given.
PipelineConfig config_from_json(const json& j,
                                const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Everything that influences results. Worker count and output directory
/// are left out so they cannot change output bytes.
json config_to_json(const PipelineConfig& cfg);
std::string config_hash(const PipelineConfig& cfg);

/// Seeds for the independent random stages, derived from cfg.seed.
std::uint64_t centroid_seed(const PipelineConfig& cfg);
std::uint64_t synthetic_seed(const PipelineConfig& cfg);

/// Embedding centroids, inferred patterns, validators, score tables and any
/// random-hash functions, built against the training corpus.
FunctionRegistry build_registry(const PipelineConfig& cfg,
                                const Corpus& training);

struct GenResult {
  Corpus training;
  FunctionRegistry fns;
  AssessResult assessed;
};

/// Filters the raw corpus, builds functions and assesses the full grid.
GenResult run_gen(const PipelineConfig& cfg, const Corpus& raw);
/// Same, with a caller-supplied registry.
GenResult run_gen(const PipelineConfig& cfg, const Corpus& raw,
                  FunctionRegistry fns);

struct SelectRun {
  std::vector<SynthColumn> synth;
  std::vector<CandidateStats> stats;
  SelectionResult selection;
  SdcStore store;
};

/// Distant supervision, the selection problem and rounding. `training` must
/// be the filtered corpus R_all was assessed on.
SelectRun run_select(const PipelineConfig& cfg, const FunctionRegistry& fns,
                     std::span<const AssessedSdc> r_all,
                     const Corpus& training);

std::vector<Detection> run_infer(const SdcStore& store, const Corpus& corpus,
                                 double min_confidence,
                                 const CorpusOptions& opts = {},
                                 unsigned workers = 1);

/// Gate summary written next to R_all.
json gen_summary(const PipelineConfig& cfg, const GenResult& gen,
                 std::size_t raw_columns);

}  // namespace autotest
