#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "autotest/corpus.hpp"
#include "autotest/pattern.hpp"
#include "autotest/validators.hpp"

namespace autotest {

enum class Family { score_table, embedding, pattern, validator, random_hash };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// Pattern and validator functions only ever return 0 or 1.
constexpr bool is_binary(Family family) {
  return family == Family::pattern || family == Family::validator;
}

/// Distance assigned to values with no embedding: outside every ball.
inline constexpr double kOutOfVocabulary =
    std::numeric_limits<double>::infinity();

struct EmbeddingSpace {
  std::string id;
  std::size_t dimension = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
  std::filesystem::path source_path;
  /// Non-fatal load diagnostics (duplicate tokens).
  std::vector<std::string> warnings;
};

/// GloVe text format: `token v1 ... vd` per line. The dimension comes from
/// the first line; a later line with a different count is an error.
/// Duplicate tokens: the last occurrence wins and a warning is recorded.
EmbeddingSpace load_embedding_space(std::istream& in, std::string id);
EmbeddingSpace load_embedding_space(const std::filesystem::path& path,
                                    std::string id);

/// Mean of the in-vocabulary whitespace tokens of the value; nullopt when no
/// token is known.
std::optional<std::vector<double>> embed_value(const EmbeddingSpace& space,
                                               const NormalizedValue& v);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

struct ScoreTableParams {
  std::string type_name;
  std::unordered_map<std::string, double> scores;
  double default_score = 0.0;
  std::filesystem::path source_path;
};

struct EmbeddingFnParams {
  std::shared_ptr<const EmbeddingSpace> space;
  std::string centroid;
  std::vector<double> centroid_vector;
};

struct PatternFnParams {
  TokenPattern pattern;
};

struct ValidatorFnParams {
  std::string validator_name;
  ValidatorFn validator = nullptr;
};

struct RandomHashParams {
  std::uint64_t seed = 0;
};

using DomainFnParams = std::variant<ScoreTableParams, EmbeddingFnParams,
                                    PatternFnParams, ValidatorFnParams,
                                    RandomHashParams>;

/// A named distance f_t(v) >= 0 from a value to a semantic type. Smaller
/// means "more in-type". Immutable and safe to share across threads.
class DomainEvalFn {
 public:
  DomainEvalFn(std::string id, DomainFnParams params);

  const std::string& id() const { return id_; }
  Family family() const { return family_; }
  const DomainFnParams& params() const { return params_; }

  double distance(const NormalizedValue& v) const;

  /// Short human-readable description used in detection explanations.
  std::string describe() const;

 private:
  std::string id_;
  Family family_;
  DomainFnParams params_;
};

inline double eval_distance(const DomainEvalFn& fn, const NormalizedValue& v) {
  return fn.distance(v);
}

/// Throws DataError when the centroid has no embedding.
DomainEvalFn make_embedding_fn(std::shared_ptr<const EmbeddingSpace> space,
                               std::string_view centroid);

/// k distinct normalized corpus values that embed, uniformly sampled.
std::vector<DomainEvalFn> sample_centroids(
    const Corpus& corpus, std::shared_ptr<const EmbeddingSpace> space,
    std::size_t k, std::uint64_t seed);

DomainEvalFn make_pattern_fn(std::string_view pattern);

/// Top-k generalized patterns ranked by the number of distinct columns in
/// which at least half of the values match. Ties break on pattern text.
std::vector<DomainEvalFn> infer_patterns(const Corpus& corpus,
                                         std::size_t top_k);

DomainEvalFn make_validator_fn(std::string_view name);
std::vector<DomainEvalFn> builtin_validators();
std::vector<DomainEvalFn> builtin_validators(
    std::span<const std::string> names);

DomainEvalFn make_score_table_fn(std::string type_name,
                                 std::unordered_map<std::string, double> scores,
                                 double default_score = 0.0);

/// JSONL lines {"value": str, "score": float in [0,1]}; keys are normalized.
DomainEvalFn load_score_table(std::istream& in, std::string type_name,
                              double default_score = 0.0);
DomainEvalFn load_score_table(const std::filesystem::path& path,
                              std::string type_name,
                              double default_score = 0.0);

DomainEvalFn make_random_hash_fn(std::uint64_t seed);

/// Uniform [0,1) hash of a string under a seed. Shared with tests.
double hash_to_unit(std::uint64_t seed, std::string_view value);

/// Holds a set of functions addressable by id.
class FunctionRegistry {
 public:
  /// Throws DataError on a duplicate id.
  void add(DomainEvalFn fn);
  void add_all(std::vector<DomainEvalFn> fns);

  const DomainEvalFn* find(std::string_view id) const;
  /// Throws DataError when absent.
  const DomainEvalFn& at(std::string_view id) const;

  const std::vector<DomainEvalFn>& functions() const { return fns_; }
  std::size_t size() const { return fns_.size(); }

 private:
  std::vector<DomainEvalFn> fns_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace autotest
