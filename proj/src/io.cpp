#include "autotest/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "autotest/common.hpp"

namespace autotest {

namespace {

constexpr int kFormatVersion = 1;

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

template <typename F>
auto parse_lines(std::istream& in, const char* what, F per_line) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      per_line(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(std::string(what) + " line " + std::to_string(lineno) +
                      ": " + e.what());
    }
  }
}

}  // namespace

json functions_to_json(std::span<const DomainEvalFn> fns) {
  std::map<std::string, json> spaces;
  json list = json::array();
  for (const auto& fn : fns) {
    json f{{"id", fn.id()}, {"family", std::string(to_string(fn.family()))}};
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ScoreTableParams>) {
            f["type"] = p.type_name;
            f["default_score"] = p.default_score;
            if (!p.source_path.empty()) {
              f["path"] = std::filesystem::absolute(p.source_path).string();
            } else {
              std::map<std::string, double> ordered(p.scores.begin(), p.scores.end());
              f["scores"] = ordered;
            }
          } else if constexpr (std::is_same_v<P, EmbeddingFnParams>) {
            f["space"] = p.space->id;
            f["centroid"] = p.centroid;
            if (!spaces.count(p.space->id)) {
              json s{{"id", p.space->id}};
              if (!p.space->source_path.empty()) {
                s["path"] = std::filesystem::absolute(p.space->source_path).string();
              } else {
                std::map<std::string, std::vector<double>> ordered(
                    p.space->vectors.begin(), p.space->vectors.end());
                s["vectors"] = ordered;
              }
              spaces.emplace(p.space->id, std::move(s));
            }
          } else if constexpr (std::is_same_v<P, PatternFnParams>) {
            f["pattern"] = p.pattern.text();
          } else if constexpr (std::is_same_v<P, ValidatorFnParams>) {
            f["name"] = p.validator_name;
          } else {
            f["seed"] = p.seed;
          }
        },
        fn.params());
    list.push_back(std::move(f));
  }
  json space_list = json::array();
  for (auto& [_, s] : spaces) space_list.push_back(std::move(s));
  return json{{"version", kFormatVersion},
              {"spaces", std::move(space_list)},
              {"functions", std::move(list)}};
}

FunctionRegistry functions_from_json(const json& j,
                                     const std::filesystem::path& base_dir) {
  try {
    std::map<std::string, std::shared_ptr<const EmbeddingSpace>> spaces;
    for (const auto& s : j.value("spaces", json::array())) {
      const auto id = s.at("id").get<std::string>();
      if (s.contains("path")) {
        spaces[id] = std::make_shared<const EmbeddingSpace>(
            load_embedding_space(resolve(base_dir, s.at("path").get<std::string>()), id));
      } else {
        auto space = std::make_shared<EmbeddingSpace>();
        space->id = id;
        for (const auto& [tok, vec] : s.at("vectors").items()) {
          space->vectors[tok] = vec.get<std::vector<double>>();
          space->dimension = space->vectors[tok].size();
        }
        spaces[id] = std::move(space);
      }
    }
    FunctionRegistry reg;
    for (const auto& f : j.at("functions")) {
      const auto family = family_from_string(f.at("family").get<std::string>());
      DomainEvalFn fn = [&]() -> DomainEvalFn {
        switch (family) {
          case Family::score_table: {
            const auto type = f.at("type").get<std::string>();
            const double def = f.value("default_score", 0.0);
            if (f.contains("path")) {
              return load_score_table(resolve(base_dir, f.at("path").get<std::string>()),
                                      type, def);
            }
            std::unordered_map<std::string, double> scores;
            for (const auto& [k, v] : f.at("scores").items()) scores[k] = v.get<double>();
            return make_score_table_fn(type, std::move(scores), def);
          }
          case Family::embedding: {
            const auto sid = f.at("space").get<std::string>();
            auto it = spaces.find(sid);
            if (it == spaces.end()) throw DataError("unknown embedding space '" + sid + "'");
            return make_embedding_fn(it->second, f.at("centroid").get<std::string>());
          }
          case Family::pattern:
            return make_pattern_fn(f.at("pattern").get<std::string>());
          case Family::validator:
            return make_validator_fn(f.at("name").get<std::string>());
          case Family::random_hash:
            return make_random_hash_fn(f.at("seed").get<std::uint64_t>());
        }
        throw DataError("unknown family");
      }();
      if (f.contains("id") && f.at("id").get<std::string>() != fn.id()) {
        throw DataError("function id mismatch: manifest has '" +
                        f.at("id").get<std::string>() + "', rebuilt '" + fn.id() + "'");
      }
      reg.add(std::move(fn));
    }
    return reg;
  } catch (const json::exception& e) {
    throw DataError(std::string("function manifest: ") + e.what());
  }
}

json sdc_to_json(const Sdc& s) {
  return json{{"id", s.id},     {"fn_id", s.fn_id}, {"d_in", s.d_in},
              {"d_out", s.d_out}, {"m", s.m},       {"confidence", s.confidence}};
}

Sdc sdc_from_json(const json& j) {
  Sdc s;
  s.fn_id = j.at("fn_id").get<std::string>();
  s.d_in = j.at("d_in").get<double>();
  s.d_out = j.at("d_out").get<double>();
  s.m = j.at("m").get<double>();
  s.confidence = j.value("confidence", 0.0);
  s.id = j.contains("id") ? j.at("id").get<std::string>()
                          : make_sdc_id(s.fn_id, s.d_in, s.d_out, s.m);
  return s;
}

json grid_to_json(const GridSpec& g) {
  json radii = json::object();
  for (const auto& [fam, r] : g.radii) {
    radii[std::string(to_string(fam))] = {{"d_in", r.d_in},
                                          {"d_out", r.d_out},
                                          {"d_out_offsets", r.d_out_offsets}};
  }
  return json{{"m_values", g.m_values}, {"radii", radii}};
}

GridSpec grid_from_json(const json& j) {
  GridSpec g = GridSpec::defaults();
  try {
    if (j.contains("m_values")) g.m_values = j.at("m_values").get<std::vector<double>>();
    const json radii = j.value("radii", json::object());
    for (const auto& [name, r] : radii.items()) {
      RadiusGrid rg;
      if (r.contains("d_in_range")) {
        const auto range = r.at("d_in_range").get<std::vector<double>>();
        if (range.size() != 3) throw DataError("d_in_range needs [first, last, step]");
        rg.d_in = stepped(range[0], range[1], range[2]);
      } else {
        rg.d_in = r.value("d_in", std::vector<double>{});
      }
      rg.d_out = r.value("d_out", std::vector<double>{});
      rg.d_out_offsets = r.value("d_out_offsets", std::vector<double>{});
      g.radii[family_from_string(name)] = std::move(rg);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("grid: ") + e.what());
  }
  for (double m : g.m_values) {
    if (!(m > 0.0 && m <= 1.0)) throw DataError("grid m values must lie in (0, 1]");
  }
  return g;
}

void write_r_all(std::span<const AssessedSdc> r_all, std::ostream& out) {
  for (const auto& a : r_all) {
    json j = sdc_to_json(a.sdc);
    j["table"] = {a.table.covered_triggered, a.table.covered_not_triggered,
                  a.table.notcovered_triggered, a.table.notcovered_not_triggered};
    j["h"] = a.h;
    j["p"] = a.p;
    out << j.dump() << '\n';
  }
}

std::vector<AssessedSdc> read_r_all(std::istream& in) {
  std::vector<AssessedSdc> out;
  parse_lines(in, "R_all", [&](const json& j) {
    AssessedSdc a;
    a.sdc = sdc_from_json(j);
    const auto t = j.at("table").get<std::vector<std::uint64_t>>();
    if (t.size() != 4) throw DataError("R_all table must have 4 counts");
    a.table = {t[0], t[1], t[2], t[3]};
    a.h = j.value("h", 0.0);
    a.p = j.value("p", 1.0);
    out.push_back(std::move(a));
  });
  return out;
}

json store_to_json(const SdcStore& store) {
  std::set<std::string> used;
  for (const auto& s : store.sdcs) used.insert(s.fn_id);
  std::vector<DomainEvalFn> fns;
  for (const auto& id : used) fns.push_back(store.fns.at(id));
  json sdcs = json::array();
  for (const auto& s : store.sdcs) sdcs.push_back(sdc_to_json(s));
  return json{{"version", kFormatVersion},
              {"config_hash", store.config_hash},
              {"config", store.config},
              {"functions", functions_to_json(fns)},
              {"sdcs", std::move(sdcs)},
              {"provenance", store.provenance}};
}

SdcStore store_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    if (j.at("version").get<int>() != kFormatVersion) {
      throw DataError("unsupported store version");
    }
    SdcStore s;
    s.config_hash = j.value("config_hash", "");
    s.config = j.value("config", json::object());
    s.provenance = j.value("provenance", json::object());
    s.fns = functions_from_json(j.at("functions"), base_dir);
    for (const auto& x : j.at("sdcs")) {
      s.sdcs.push_back(sdc_from_json(x));
      if (!s.fns.find(s.sdcs.back().fn_id)) {
        throw DataError("store SDC references unknown function " + s.sdcs.back().fn_id);
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("SDC store: ") + e.what());
  }
}

json detection_to_json(const Detection& d) {
  return json{{"column_id", d.column_id}, {"value_index", d.value_index},
              {"value", d.value},         {"confidence", d.confidence},
              {"sdc_id", d.sdc_id},       {"explanation", d.explanation}};
}

Detection detection_from_json(const json& j) {
  return Detection{j.at("column_id").get<std::string>(),
                   j.at("value_index").get<std::size_t>(),
                   j.value("value", ""),
                   j.at("confidence").get<double>(),
                   j.value("sdc_id", ""),
                   j.value("explanation", "")};
}

void write_report(std::span<const Detection> report, std::ostream& out) {
  for (const auto& d : report) out << detection_to_json(d).dump() << '\n';
}

std::vector<Detection> read_report(std::istream& in) {
  std::vector<Detection> out;
  parse_lines(in, "report", [&](const json& j) { out.push_back(detection_from_json(j)); });
  return out;
}

json metrics_to_json(const Metrics& m) {
  json points = json::array();
  for (const auto& p : m.points) {
    points.push_back({{"threshold", p.threshold},
                      {"precision", p.precision},
                      {"recall", p.recall}});
  }
  return json{{"pr_auc", m.pr_auc}, {"f1_at_p08", m.f1_at_p08}, {"points", points}};
}

void write_pr_csv(std::span<const PrPoint> points, std::ostream& out) {
  out << "threshold,precision,recall\n";
  for (const auto& p : points) {
    out << format_real(p.threshold) << ',' << format_real(p.precision) << ','
        << format_real(p.recall) << '\n';
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace autotest
