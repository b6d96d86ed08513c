#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "autotest/corpus.hpp"
#include "autotest/domain_fns.hpp"

namespace autotest {

/// Knobs for the synthetic typed corpus used by demos, benchmarks and tests.
struct DemoOptions {
  std::size_t columns = 2000;
  std::size_t min_length = 20;
  std::size_t max_length = 40;
  std::uint64_t seed = 7;
  /// Include the small-vocabulary word domains (months, colors, ...). The
  /// rest are high-cardinality formatted domains (ids, dates, urls, ...).
  bool vocabulary_domains = true;
  std::size_t embedding_dim = 16;
};

struct DemoData {
  Corpus corpus;
  /// Domain name per column, aligned with the corpus.
  std::vector<std::string> domains;
  std::shared_ptr<const EmbeddingSpace> embedding;
  /// Score tables by type name.
  std::map<std::string, std::unordered_map<std::string, double>> score_tables;
};

std::vector<std::string> demo_domain_names(bool vocabulary_domains = true);

/// Deterministic for a given DemoOptions.
DemoData make_demo_data(const DemoOptions& opts);

/// Writes corpus.jsonl, embeddings.txt, score_<type>.jsonl and a pipeline
/// config.json that references them.
void write_demo_files(const DemoData& data, const std::filesystem::path& dir);

}  // namespace autotest
