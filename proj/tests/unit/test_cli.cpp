#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "autotest/io.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "autotest_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(SDC_BINARY) + " " + args + " >" +
                          (kDir / "stdout.txt").string() + " 2>" +
                          (kDir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("exit codes") {
  fs::remove_all(kDir);
  fs::create_directories(kDir);
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("infer --corpus x") == 1);
  CHECK(run("inject --corpus x --out y --truth-out z --rate 2") == 1);
  CHECK(run("gen --format parquet") == 1);
  CHECK(run("--workers 0 gen") == 1);
  CHECK(run("inject --corpus /nonexistent.jsonl --out y --truth-out z") == 2);

  std::ofstream(kDir / "broken.jsonl") << "{not json\n";
  CHECK(run("inject --corpus " + (kDir / "broken.jsonl").string() + " --out " +
            (kDir / "o.jsonl").string() + " --truth-out " + (kDir / "t.jsonl").string()) == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("demo pipeline through the binary") {
  fs::remove_all(kDir);
  fs::create_directories(kDir);
  const auto d = kDir.string();
  REQUIRE(run("demo-data --out-dir " + d + "/train --columns 500") == 0);
  const auto cfg = " --config " + d + "/train/config.json";
  REQUIRE(run(cfg + " gen --out-dir " + d + "/w1") == 0);
  REQUIRE(run(cfg + " --workers 4 gen --out-dir " + d + "/w4") == 0);
  CHECK(slurp(kDir / "w1/r_all.jsonl") == slurp(kDir / "w4/r_all.jsonl"));
  CHECK(fs::exists(kDir / "w1/functions.json"));
  CHECK(fs::exists(kDir / "w1/gen_summary.json"));

  REQUIRE(run(cfg + " select --out-dir " + d + "/w1") == 0);
  REQUIRE(run(cfg + " --workers 4 select --out-dir " + d + "/w4") == 0);
  CHECK(slurp(kDir / "w1/store.json") == slurp(kDir / "w4/store.json"));
  const auto store = autotest::read_json_file(kDir / "w1/store.json");
  CHECK(store.at("sdcs").size() > 0);

  REQUIRE(run("demo-data --out-dir " + d + "/test --columns 100") == 0);
  REQUIRE(run("--seed 3 inject --corpus " + d + "/test/corpus.jsonl --rate 0.1 --out " + d +
              "/dirty.jsonl --truth-out " + d + "/truth.jsonl") == 0);
  REQUIRE(run("infer --rules " + d + "/w1/store.json --corpus " + d + "/dirty.jsonl --out " + d +
              "/report.jsonl") == 0);
  REQUIRE(run("--workers 3 infer --rules " + d + "/w1/store.json --corpus " + d +
              "/dirty.jsonl --out " + d + "/report3.jsonl") == 0);
  CHECK(slurp(kDir / "report.jsonl") == slurp(kDir / "report3.jsonl"));
  REQUIRE(run("bench --report " + d + "/report.jsonl --truth " + d + "/truth.jsonl --out " + d +
              "/metrics.json --csv " + d + "/pr.csv --baseline-functions " + d +
              "/w1/functions.json --corpus " + d + "/dirty.jsonl") == 0);
  const auto metrics = autotest::read_json_file(kDir / "metrics.json");
  CHECK(metrics.contains("pr_auc"));
  CHECK(metrics.contains("f1_at_p08"));
  CHECK(slurp(kDir / "pr.csv").rfind("threshold,precision,recall\n", 0) == 0);
  fs::remove_all(kDir);
}
