#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace autotest {

struct Column {
  std::string id;
  std::optional<std::string> header;
  std::vector<std::string> values;

  bool operator==(const Column&) const = default;
};

/// A bag of independent columns. Immutable once built; ids are unique and
/// every column carries at least one value.
class Corpus {
 public:
  Corpus() = default;

  /// Throws DataError on an empty column or a duplicate id.
  void add(Column column);

  const std::vector<Column>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  bool empty() const { return columns_.empty(); }
  const Column& operator[](std::size_t i) const { return columns_[i]; }
  auto begin() const { return columns_.begin(); }
  auto end() const { return columns_.end(); }

  const Column* find(std::string_view id) const;

  bool operator==(const Corpus& other) const {
    return columns_ == other.columns_;
  }

 private:
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct NormalizedValue {
  std::string raw;
  std::string trimmed_lower;
};

/// Whitespace trim plus ASCII case folding. Bytes >= 0x80 pass through.
NormalizedValue normalize_value(std::string_view raw);
std::string trim(std::string_view s);
std::string casefold(std::string_view s);

struct CorpusOptions {
  bool dedupe_values = false;
  bool skip_numeric_columns = true;
  double numeric_fraction = 0.9;
  std::size_t max_value_length = 512;
};

bool parses_as_number(std::string_view s);
bool is_numeric_dominant(const Column& column, double fraction = 0.9);

/// Normalized values as seen by domain functions: one entry per raw cell,
/// truncated to `max_value_length` bytes (raw kept intact).
std::vector<NormalizedValue> evaluation_values(const Column& column,
                                               const CorpusOptions& opts);

/// Drops numeric-dominant columns (when enabled) and dedupes values (when
/// enabled). Used on training inputs only.
Corpus prepare_training_corpus(const Corpus& corpus, const CorpusOptions& opts);

enum class CorpusFormat { jsonl, csv_dir };

CorpusFormat corpus_format_from_string(std::string_view name);

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   bool csv_has_header = true);
Corpus load_corpus_jsonl(std::istream& in);
Corpus load_corpus_csv_dir(const std::filesystem::path& dir, bool has_header);

/// RFC-4180 record parsing; exposed for tests.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);
void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

/// Returns (train, heldout). heldout holds exactly n columns drawn uniformly
/// without replacement; both keep the corpus's original column order.
std::pair<Corpus, Corpus> sample_columns(const Corpus& corpus, std::size_t n,
                                         std::uint64_t seed);

}  // namespace autotest
