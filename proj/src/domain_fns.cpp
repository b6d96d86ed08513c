#include "autotest/domain_fns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "autotest/common.hpp"
#include "json.hpp"

namespace autotest {

using json = nlohmann::json;

std::string_view to_string(Family family) {
  switch (family) {
    case Family::score_table: return "score_table";
    case Family::embedding: return "embedding";
    case Family::pattern: return "pattern";
    case Family::validator: return "validator";
    case Family::random_hash: return "random_hash";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::score_table, Family::embedding, Family::pattern,
                   Family::validator, Family::random_hash}) {
    if (to_string(f) == name) return f;
  }
  throw DataError("unknown function family '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Embeddings

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' ||
                            s[i] == '\n')) {
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r' &&
           s[j] != '\n') {
      ++j;
    }
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

EmbeddingSpace load_embedding_space(std::istream& in, std::string id) {
  EmbeddingSpace space;
  space.id = std::move(id);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    const std::size_t dim = fields.size() - 1;
    if (dim == 0) {
      throw DataError("embedding line " + std::to_string(line_no) +
                      ": token without vector");
    }
    if (space.dimension == 0) {
      space.dimension = dim;
    } else if (dim != space.dimension) {
      throw DataError("embedding line " + std::to_string(line_no) +
                      ": dimension " + std::to_string(dim) + ", expected " +
                      std::to_string(space.dimension));
    }
    std::vector<double> vec(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      auto f = fields[k + 1];
      auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), vec[k]);
      if (ec != std::errc{} || end != f.data() + f.size()) {
        throw DataError("embedding line " + std::to_string(line_no) +
                        ": bad number '" + std::string(f) + "'");
      }
    }
    std::string token(fields[0]);
    auto [it, inserted] = space.vectors.insert_or_assign(token, std::move(vec));
    if (!inserted) {
      space.warnings.push_back("duplicate token '" + token + "' at line " +
                               std::to_string(line_no) +
                               "; last occurrence kept");
    }
  }
  if (space.vectors.empty()) throw DataError("empty embedding file");
  return space;
}

EmbeddingSpace load_embedding_space(const std::filesystem::path& path,
                                    std::string id) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path.string());
  EmbeddingSpace space = load_embedding_space(in, std::move(id));
  space.source_path = path;
  return space;
}

std::optional<std::vector<double>> embed_value(const EmbeddingSpace& space,
                                               const NormalizedValue& v) {
  std::vector<double> sum(space.dimension, 0.0);
  std::size_t hits = 0;
  for (auto token : split_ws(v.trimmed_lower)) {
    auto it = space.vectors.find(std::string(token));
    if (it == space.vectors.end()) continue;
    for (std::size_t k = 0; k < space.dimension; ++k) sum[k] += it->second[k];
    ++hits;
  }
  if (hits == 0) return std::nullopt;
  if (hits > 1) {
    for (double& x : sum) x /= static_cast<double>(hits);
  }
  return sum;
}

double euclidean_distance(std::span<const double> a,
                          std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// DomainEvalFn

DomainEvalFn::DomainEvalFn(std::string id, DomainFnParams params)
    : id_(std::move(id)),
      family_(static_cast<Family>(params.index())),
      params_(std::move(params)) {}

double hash_to_unit(std::uint64_t seed, std::string_view value) {
  const std::uint64_t h = splitmix64(fnv1a64(value) ^ splitmix64(seed));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double DomainEvalFn::distance(const NormalizedValue& v) const {
  struct Visitor {
    const NormalizedValue& v;
    double operator()(const ScoreTableParams& p) const {
      auto it = p.scores.find(v.trimmed_lower);
      return 1.0 - (it == p.scores.end() ? p.default_score : it->second);
    }
    double operator()(const EmbeddingFnParams& p) const {
      auto vec = embed_value(*p.space, v);
      if (!vec) return kOutOfVocabulary;
      return euclidean_distance(p.centroid_vector, *vec);
    }
    double operator()(const PatternFnParams& p) const {
      return p.pattern.matches(v.trimmed_lower) ? 0.0 : 1.0;
    }
    double operator()(const ValidatorFnParams& p) const {
      return p.validator(v.trimmed_lower) ? 0.0 : 1.0;
    }
    double operator()(const RandomHashParams& p) const {
      return hash_to_unit(p.seed, v.trimmed_lower);
    }
  };
  return std::visit(Visitor{v}, params_);
}

std::string DomainEvalFn::describe() const {
  struct Visitor {
    std::string operator()(const ScoreTableParams& p) const {
      return "type '" + p.type_name + "' (1 - classifier score)";
    }
    std::string operator()(const EmbeddingFnParams& p) const {
      return "'" + p.centroid + "' in embedding space '" + p.space->id + "'";
    }
    std::string operator()(const PatternFnParams& p) const {
      return "pattern '" + p.pattern.text() + "'";
    }
    std::string operator()(const ValidatorFnParams& p) const {
      return "validator " + p.validator_name + "()";
    }
    std::string operator()(const RandomHashParams& p) const {
      return "random hash " + std::to_string(p.seed);
    }
  };
  return std::visit(Visitor{}, params_);
}

// ---------------------------------------------------------------------------
// Constructors

DomainEvalFn make_embedding_fn(std::shared_ptr<const EmbeddingSpace> space,
                               std::string_view centroid) {
  const NormalizedValue c = normalize_value(centroid);
  auto vec = embed_value(*space, c);
  if (!vec) {
    throw DataError("centroid '" + std::string(centroid) +
                    "' is out of vocabulary in space '" + space->id + "'");
  }
  std::string id = "emb:" + space->id + ":" + c.trimmed_lower;
  return DomainEvalFn(std::move(id), EmbeddingFnParams{std::move(space),
                                                       c.trimmed_lower,
                                                       std::move(*vec)});
}

std::vector<DomainEvalFn> sample_centroids(
    const Corpus& corpus, std::shared_ptr<const EmbeddingSpace> space,
    std::size_t k, std::uint64_t seed) {
  std::set<std::string> distinct;
  for (const auto& column : corpus) {
    for (const auto& raw : column.values) {
      distinct.insert(normalize_value(raw).trimmed_lower);
    }
  }
  std::vector<std::string> pool;
  for (const auto& value : distinct) {
    if (embed_value(*space, NormalizedValue{value, value})) {
      pool.push_back(value);
    }
  }
  if (pool.size() < k) {
    throw DataError("centroid pool has " + std::to_string(pool.size()) +
                    " embeddable values, fewer than k=" + std::to_string(k));
  }
  Rng rng(seed);
  rng.shuffle(pool);
  std::vector<DomainEvalFn> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(make_embedding_fn(space, pool[i]));
  }
  return out;
}

DomainEvalFn make_pattern_fn(std::string_view pattern) {
  return DomainEvalFn("pat:" + std::string(pattern),
                      PatternFnParams{TokenPattern::parse(pattern)});
}

std::vector<DomainEvalFn> infer_patterns(const Corpus& corpus,
                                         std::size_t top_k) {
  std::map<std::string, std::size_t> column_support;
  for (const auto& column : corpus) {
    std::map<std::string, std::size_t> counts;
    for (const auto& raw : column.values) {
      ++counts[generalize_value(normalize_value(raw).trimmed_lower)];
    }
    const std::size_t n = column.values.size();
    for (const auto& [pattern, count] : counts) {
      if (2 * count >= n) ++column_support[pattern];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(
      column_support.begin(), column_support.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  std::vector<DomainEvalFn> out;
  for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i) {
    if (ranked[i].first.empty()) continue;
    out.push_back(make_pattern_fn(ranked[i].first));
  }
  return out;
}

DomainEvalFn make_validator_fn(std::string_view name) {
  ValidatorFn fn = find_validator(name);
  if (fn == nullptr) {
    throw DataError("unknown validator '" + std::string(name) + "'");
  }
  return DomainEvalFn("fun:" + std::string(name),
                      ValidatorFnParams{std::string(name), fn});
}

std::vector<DomainEvalFn> builtin_validators() {
  return builtin_validators(validator_names());
}

std::vector<DomainEvalFn> builtin_validators(
    std::span<const std::string> names) {
  std::vector<DomainEvalFn> out;
  for (const auto& name : names) out.push_back(make_validator_fn(name));
  return out;
}

DomainEvalFn make_score_table_fn(std::string type_name,
                                 std::unordered_map<std::string, double> scores,
                                 double default_score) {
  if (default_score < 0.0 || default_score > 1.0) {
    throw DataError("default_score outside [0,1]");
  }
  std::string id = "cta:" + type_name;
  return DomainEvalFn(std::move(id),
                      ScoreTableParams{std::move(type_name), std::move(scores),
                                       default_score, {}});
}

DomainEvalFn load_score_table(std::istream& in, std::string type_name,
                              double default_score) {
  std::unordered_map<std::string, double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "score table line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw DataError(where + ": malformed JSON");
    }
    if (!j.contains("value") || !j["value"].is_string() ||
        !j.contains("score") || !j["score"].is_number()) {
      throw DataError(where + ": expected {\"value\": str, \"score\": num}");
    }
    const double score = j["score"].get<double>();
    if (!(score >= 0.0 && score <= 1.0)) {
      throw DataError(where + ": score " + format_real(score) +
                      " outside [0,1]");
    }
    scores[normalize_value(j["value"].get<std::string>()).trimmed_lower] =
        score;
  }
  return make_score_table_fn(std::move(type_name), std::move(scores),
                             default_score);
}

DomainEvalFn load_score_table(const std::filesystem::path& path,
                              std::string type_name, double default_score) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open score table " + path.string());
  DomainEvalFn fn = load_score_table(in, std::move(type_name), default_score);
  auto params = std::get<ScoreTableParams>(fn.params());
  params.source_path = path;
  return DomainEvalFn(fn.id(), std::move(params));
}

DomainEvalFn make_random_hash_fn(std::uint64_t seed) {
  return DomainEvalFn("hash:" + std::to_string(seed), RandomHashParams{seed});
}

// ---------------------------------------------------------------------------
// Registry

void FunctionRegistry::add(DomainEvalFn fn) {
  if (index_.count(fn.id()) != 0) {
    throw DataError("duplicate function id " + fn.id());
  }
  index_.emplace(fn.id(), fns_.size());
  fns_.push_back(std::move(fn));
}

void FunctionRegistry::add_all(std::vector<DomainEvalFn> fns) {
  for (auto& fn : fns) add(std::move(fn));
}

const DomainEvalFn* FunctionRegistry::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &fns_[it->second];
}

const DomainEvalFn& FunctionRegistry::at(std::string_view id) const {
  const DomainEvalFn* fn = find(id);
  if (fn == nullptr) throw DataError("unknown function id " + std::string(id));
  return *fn;
}

}  // namespace autotest
