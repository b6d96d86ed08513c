#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "autotest/assess.hpp"
#include "autotest/candidates.hpp"
#include "autotest/domain_fns.hpp"
#include "autotest/eval.hpp"
#include "autotest/infer.hpp"
#include "autotest/select.hpp"
#include "json.hpp"

namespace autotest {

using json = nlohmann::json;

/// {"version", "spaces": [...], "functions": [...]}. Embedding spaces and
/// score tables loaded from disk are referenced by path (resolved against
/// `base_dir` when relative); in-memory ones are written inline.
json functions_to_json(std::span<const DomainEvalFn> fns);
FunctionRegistry functions_from_json(const json& j,
                                     const std::filesystem::path& base_dir = {});

json sdc_to_json(const Sdc& s);
Sdc sdc_from_json(const json& j);

json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const json& j);

/// One assessed candidate per line, sorted by id.
void write_r_all(std::span<const AssessedSdc> r_all, std::ostream& out);
std::vector<AssessedSdc> read_r_all(std::istream& in);

struct SdcStore {
  std::string config_hash;
  json config;
  std::vector<Sdc> sdcs;
  FunctionRegistry fns;
  json provenance;
};

/// Only the functions referenced by `sdcs` are written.
json store_to_json(const SdcStore& store);
SdcStore store_from_json(const json& j,
                         const std::filesystem::path& base_dir = {});

json detection_to_json(const Detection& d);
Detection detection_from_json(const json& j);
void write_report(std::span<const Detection> report, std::ostream& out);
std::vector<Detection> read_report(std::istream& in);

json metrics_to_json(const Metrics& m);
void write_pr_csv(std::span<const PrPoint> points, std::ostream& out);

/// File helpers raising DataError on IO failure.
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace autotest
