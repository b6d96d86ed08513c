#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "autotest/common.hpp"
#include "autotest/corpus.hpp"
#include "doctest.h"

using namespace autotest;
namespace fs = std::filesystem;

namespace {

Corpus from_jsonl(const std::string& text) {
  std::istringstream in(text);
  return load_corpus_jsonl(in);
}

Corpus numbered(std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    c.add(Column{"c" + std::to_string(i), std::nullopt, {"v" + std::to_string(i)}});
  }
  return c;
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("autotest_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("jsonl loading") {
  auto c = from_jsonl("{\"id\":\"c1\",\"values\":[\"a\",\"b\"]}\n");
  REQUIRE(c.size() == 1);
  CHECK(c[0].id == "c1");
  CHECK(c[0].values == std::vector<std::string>{"a", "b"});
  CHECK_FALSE(c[0].header.has_value());

  CHECK(from_jsonl("").empty());

  CHECK_THROWS_WITH_AS(from_jsonl("{\"id\":\"c1\",\"values\":[]}\n"),
                       doctest::Contains("empty column c1"), DataError);
  CHECK_THROWS_WITH_AS(from_jsonl("{\"id\":\"c1\",\"values\":[\"a\"]}\n{oops\n"),
                       doctest::Contains("line 2"), DataError);
  CHECK_THROWS_AS(from_jsonl("{\"id\":\"c1\",\"values\":[\"a\"]}\n"
                             "{\"id\":\"c1\",\"values\":[\"b\"]}\n"),
                  DataError);
}

TEST_CASE("normalize_value") {
  CHECK(normalize_value("  Seattle ").trimmed_lower == "seattle");
  CHECK(normalize_value("  Seattle ").raw == "  Seattle ");
  CHECK(normalize_value("").trimmed_lower == "");
  CHECK(normalize_value("12/3/2020").trimmed_lower == "12/3/2020");
  // Idempotent.
  const auto once = normalize_value("\t MiXeD Case\n").trimmed_lower;
  CHECK(normalize_value(once).trimmed_lower == once);
  // Non-ASCII bytes pass through untouched.
  CHECK(normalize_value("Ärger").trimmed_lower == "Ärger");
}

TEST_CASE("numeric detection") {
  CHECK(parses_as_number("42"));
  CHECK(parses_as_number(" -3.5e2 "));
  CHECK(parses_as_number("+7"));
  CHECK_FALSE(parses_as_number("12/3/2020"));
  CHECK_FALSE(parses_as_number("107 patients"));
  CHECK_FALSE(parses_as_number(""));
  Column nums{"n", std::nullopt, {"1", "2", "3", "4", "5", "6", "7", "8", "9", "x"}};
  CHECK(is_numeric_dominant(nums, 0.9));
  nums.values[8] = "y";
  CHECK_FALSE(is_numeric_dominant(nums, 0.9));
}

TEST_CASE("evaluation values truncate without touching raw") {
  Column c{"c", std::nullopt, {std::string(600, 'A')}};
  CorpusOptions opts;
  const auto vals = evaluation_values(c, opts);
  REQUIRE(vals.size() == 1);
  CHECK(vals[0].trimmed_lower.size() == 512);
  CHECK(vals[0].raw.size() == 600);
}

TEST_CASE("training preparation") {
  Corpus c;
  c.add(Column{"num", std::nullopt, {"1", "2", "3"}});
  c.add(Column{"txt", std::nullopt, {"a", "a", "b"}});
  CorpusOptions opts;
  auto t = prepare_training_corpus(c, opts);
  REQUIRE(t.size() == 1);
  CHECK(t[0].values.size() == 3);  // duplicates kept by default
  opts.dedupe_values = true;
  opts.skip_numeric_columns = false;
  t = prepare_training_corpus(c, opts);
  CHECK(t.size() == 2);
  CHECK(t.find("txt")->values.size() == 2);
}

TEST_CASE("sample_columns partitions deterministically") {
  const auto c = numbered(30);
  auto [train0, held0] = sample_columns(c, 0, 1);
  CHECK(train0 == c);
  CHECK(held0.empty());
  auto [trainN, heldN] = sample_columns(c, 30, 1);
  CHECK(trainN.empty());
  CHECK(heldN.size() == 30);

  auto [train, held] = sample_columns(c, 12, 9);
  CHECK(train.size() + held.size() == c.size());
  CHECK(held.size() == 12);
  std::set<std::string> ids;
  for (const auto& col : train) ids.insert(col.id);
  for (const auto& col : held) CHECK(ids.insert(col.id).second);
  auto [train2, held2] = sample_columns(c, 12, 9);
  CHECK(held2 == held);
  CHECK(train2 == train);
  CHECK_THROWS(sample_columns(c, 31, 1));
}

TEST_CASE("jsonl round trip") {
  Corpus c;
  c.add(Column{"a", std::string("Header \"quoted\""), {"x", " y ", "ü,z"}});
  c.add(Column{"b", std::nullopt, {"1"}});
  std::ostringstream out;
  write_corpus_jsonl(c, out);
  CHECK(from_jsonl(out.str()) == c);
}

TEST_CASE("csv parsing and directory loading") {
  const auto rows = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n1,2,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});

  const auto dir = scratch_dir("csv");
  std::ofstream(dir / "t2.csv") << "city,code\nseattle,A1\n,B2\n";
  std::ofstream(dir / "t1.csv") << "x\n\"multi\nline\"\n";
  auto c = load_corpus(dir, CorpusFormat::csv_dir, true);
  REQUIRE(c.size() == 3);
  CHECK(c[0].id == "t1.csv:0");
  CHECK(c[0].values == std::vector<std::string>{"multi\nline"});
  CHECK(c[1].id == "t2.csv:0");
  CHECK(c[1].header == std::optional<std::string>("city"));
  CHECK(c[1].values == std::vector<std::string>{"seattle"});
  CHECK(c[2].values == std::vector<std::string>{"A1", "B2"});

  auto no_header = load_corpus(dir, CorpusFormat::csv_dir, false);
  CHECK(no_header.find("t2.csv:0")->values.size() == 2);
  CHECK_THROWS_AS(load_corpus(dir / "missing", CorpusFormat::csv_dir, true), DataError);
}
