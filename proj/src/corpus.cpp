#include "autotest/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "autotest/common.hpp"
#include "json.hpp"

namespace autotest {

using json = nlohmann::json;

void Corpus::add(Column column) {
  if (column.values.empty()) {
    throw DataError("empty column " + column.id);
  }
  if (index_.count(column.id) != 0) {
    throw DataError("duplicate column id " + column.id);
  }
  index_.emplace(column.id, columns_.size());
  columns_.push_back(std::move(column));
}

const Column* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &columns_[it->second];
}

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string casefold(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

NormalizedValue normalize_value(std::string_view raw) {
  return NormalizedValue{std::string(raw), casefold(trim(raw))};
}

bool parses_as_number(std::string_view s) {
  std::string t = trim(s);
  if (t.empty()) return false;
  std::string_view v = t;
  if (v.front() == '+') v.remove_prefix(1);
  if (v.empty()) return false;
  double out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc{} && end == v.data() + v.size();
}

bool is_numeric_dominant(const Column& column, double fraction) {
  if (column.values.empty()) return false;
  std::size_t numeric = 0;
  for (const auto& v : column.values) {
    if (parses_as_number(v)) ++numeric;
  }
  return static_cast<double>(numeric) /
             static_cast<double>(column.values.size()) >=
         fraction;
}

namespace {

// Cut at a UTF-8 boundary so truncation never splits a code point.
std::string truncate_utf8(std::string s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return s;
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) {
    --cut;
  }
  s.resize(cut);
  return s;
}

}  // namespace

std::vector<NormalizedValue> evaluation_values(const Column& column,
                                               const CorpusOptions& opts) {
  std::vector<NormalizedValue> out;
  out.reserve(column.values.size());
  for (const auto& raw : column.values) {
    NormalizedValue nv = normalize_value(raw);
    nv.trimmed_lower = truncate_utf8(std::move(nv.trimmed_lower),
                                     opts.max_value_length);
    out.push_back(std::move(nv));
  }
  return out;
}

Corpus prepare_training_corpus(const Corpus& corpus,
                               const CorpusOptions& opts) {
  Corpus out;
  for (const auto& column : corpus) {
    if (opts.skip_numeric_columns &&
        is_numeric_dominant(column, opts.numeric_fraction)) {
      continue;
    }
    if (!opts.dedupe_values) {
      out.add(column);
      continue;
    }
    Column deduped{column.id, column.header, {}};
    std::unordered_set<std::string> seen;
    for (const auto& v : column.values) {
      if (seen.insert(v).second) deduped.values.push_back(v);
    }
    out.add(std::move(deduped));
  }
  return out;
}

CorpusFormat corpus_format_from_string(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "csv-dir" || name == "csv_dir") return CorpusFormat::csv_dir;
  throw DataError("unknown corpus format '" + std::string(name) + "'");
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   bool csv_has_header) {
  if (!std::filesystem::exists(path)) {
    throw DataError("corpus path does not exist: " + path.string());
  }
  if (format == CorpusFormat::csv_dir) {
    return load_corpus_csv_dir(path, csv_has_header);
  }
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return load_corpus_jsonl(in);
}

Corpus load_corpus_jsonl(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + "malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("values") || !j["values"].is_array()) {
      throw DataError(where + "expected {\"id\": str, \"values\": [str...]}");
    }
    Column column;
    column.id = j["id"].get<std::string>();
    if (j.contains("header") && !j["header"].is_null()) {
      if (!j["header"].is_string()) {
        throw DataError(where + "header must be a string");
      }
      column.header = j["header"].get<std::string>();
    }
    for (const auto& v : j["values"]) {
      if (!v.is_string()) {
        throw DataError(where + "values must be strings");
      }
      column.values.push_back(v.get<std::string>());
    }
    try {
      corpus.add(std::move(column));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return corpus;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted CSV field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

Corpus load_corpus_csv_dir(const std::filesystem::path& dir, bool has_header) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  Corpus corpus;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    std::vector<std::vector<std::string>> rows;
    try {
      rows = parse_csv(buf.str());
    } catch (const DataError& e) {
      throw DataError(file.string() + ": " + e.what());
    }
    std::size_t width = 0;
    for (const auto& row : rows) width = std::max(width, row.size());
    std::vector<Column> columns(width);
    const std::string stem = file.filename().string();
    for (std::size_t c = 0; c < width; ++c) {
      columns[c].id = stem + ":" + std::to_string(c);
    }
    std::size_t first = 0;
    if (has_header && !rows.empty()) {
      for (std::size_t c = 0; c < rows[0].size(); ++c) {
        columns[c].header = rows[0][c];
      }
      first = 1;
    }
    for (std::size_t r = first; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        if (!trim(rows[r][c]).empty()) columns[c].values.push_back(rows[r][c]);
      }
    }
    for (auto& column : columns) {
      if (!column.values.empty()) corpus.add(std::move(column));
    }
  }
  return corpus;
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& column : corpus) {
    json j;
    j["id"] = column.id;
    if (column.header) j["header"] = *column.header;
    j["values"] = column.values;
    out << j.dump() << '\n';
  }
}

void write_corpus_jsonl(const Corpus& corpus,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_corpus_jsonl(corpus, out);
}

std::pair<Corpus, Corpus> sample_columns(const Corpus& corpus, std::size_t n,
                                         std::uint64_t seed) {
  if (n > corpus.size()) {
    throw DataError("cannot sample " + std::to_string(n) + " of " +
                    std::to_string(corpus.size()) + " columns");
  }
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<bool> held(corpus.size(), false);
  for (std::size_t i = 0; i < n; ++i) held[order[i]] = true;

  Corpus train;
  Corpus heldout;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (held[i] ? heldout : train).add(corpus[i]);
  }
  return {std::move(train), std::move(heldout)};
}

}  // namespace autotest
