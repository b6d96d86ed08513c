#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "autotest/assess.hpp"
#include "autotest/candidates.hpp"
#include "autotest/common.hpp"
#include "autotest/demo.hpp"
#include "autotest/eval.hpp"
#include "autotest/infer.hpp"
#include "autotest/io.hpp"
#include "autotest/pipeline.hpp"
#include "autotest/select.hpp"
#include "autotest/simplex.hpp"
#include "autotest/synth.hpp"

namespace py = pybind11;
using namespace autotest;

namespace {

// Python holds spaces through a mutable-pointer holder; the core only ever
// sees them as const.
using Space = std::shared_ptr<EmbeddingSpace>;

Space unconst(std::shared_ptr<const EmbeddingSpace> s) {
  return std::const_pointer_cast<EmbeddingSpace>(std::move(s));
}

Space embedding_from_dict(std::string id,
                          const std::map<std::string, std::vector<double>>& vectors) {
  auto s = std::make_shared<EmbeddingSpace>();
  s->id = std::move(id);
  for (const auto& [tok, vec] : vectors) {
    if (s->dimension == 0) s->dimension = vec.size();
    if (vec.size() != s->dimension) throw DataError("inconsistent embedding dimension");
    s->vectors[tok] = vec;
  }
  return s;
}

FunctionRegistry registry_of(const std::vector<DomainEvalFn>& fns) {
  FunctionRegistry r;
  for (const auto& f : fns) r.add(f);
  return r;
}

std::string r_all_jsonl(const std::vector<AssessedSdc>& r) {
  std::ostringstream out;
  write_r_all(r, out);
  return out.str();
}

void bind_corpus(py::module_& m) {
  py::class_<Column>(m, "Column")
      .def(py::init([](std::string id, std::vector<std::string> values,
                       std::optional<std::string> header) {
             return Column{std::move(id), std::move(header), std::move(values)};
           }),
           py::arg("id"), py::arg("values"), py::arg("header") = py::none())
      .def_readwrite("id", &Column::id)
      .def_readwrite("header", &Column::header)
      .def_readwrite("values", &Column::values)
      .def("__repr__", [](const Column& c) {
        return "Column(" + c.id + ", " + std::to_string(c.values.size()) + " values)";
      });

  py::class_<Corpus>(m, "Corpus")
      .def(py::init<>())
      .def(py::init([](const std::vector<Column>& cols) {
        Corpus c;
        for (const auto& col : cols) c.add(col);
        return c;
      }))
      .def("add", &Corpus::add)
      .def("find", [](const Corpus& c, const std::string& id) -> std::optional<Column> {
        const Column* col = c.find(id);
        return col ? std::optional<Column>(*col) : std::nullopt;
      })
      .def("__len__", &Corpus::size)
      .def("__getitem__", [](const Corpus& c, std::size_t i) {
        if (i >= c.size()) throw py::index_error();
        return c[i];
      })
      .def("__iter__", [](const Corpus& c) { return py::make_iterator(c.begin(), c.end()); },
           py::keep_alive<0, 1>())
      .def_property_readonly("columns", &Corpus::columns);

  py::class_<CorpusOptions>(m, "CorpusOptions")
      .def(py::init<>())
      .def_readwrite("dedupe_values", &CorpusOptions::dedupe_values)
      .def_readwrite("skip_numeric_columns", &CorpusOptions::skip_numeric_columns)
      .def_readwrite("numeric_fraction", &CorpusOptions::numeric_fraction)
      .def_readwrite("max_value_length", &CorpusOptions::max_value_length);

  m.def("load_corpus",
        [](const std::filesystem::path& p, const std::string& fmt, bool header) {
          return load_corpus(p, corpus_format_from_string(fmt), header);
        },
        py::arg("path"), py::arg("format") = "jsonl", py::arg("csv_has_header") = true);
  m.def("write_corpus_jsonl",
        py::overload_cast<const Corpus&, const std::filesystem::path&>(&write_corpus_jsonl));
  m.def("prepare_training_corpus", &prepare_training_corpus, py::arg("corpus"),
        py::arg("options") = CorpusOptions{});
  m.def("sample_columns", &sample_columns, py::arg("corpus"), py::arg("n"), py::arg("seed"));
}

void bind_functions(py::module_& m) {
  py::enum_<Family>(m, "Family")
      .value("score_table", Family::score_table)
      .value("embedding", Family::embedding)
      .value("pattern", Family::pattern)
      .value("validator", Family::validator)
      .value("random_hash", Family::random_hash);

  py::class_<EmbeddingSpace, Space>(m, "EmbeddingSpace")
      .def_readonly("id", &EmbeddingSpace::id)
      .def_readonly("dimension", &EmbeddingSpace::dimension)
      .def_readonly("warnings", &EmbeddingSpace::warnings)
      .def("__len__", [](const EmbeddingSpace& s) { return s.vectors.size(); });
  m.def("embedding_space", &embedding_from_dict, py::arg("id"), py::arg("vectors"));
  m.def("load_embedding_space",
        [](const std::filesystem::path& p, std::string id) -> Space {
          return std::make_shared<EmbeddingSpace>(load_embedding_space(p, std::move(id)));
        });

  py::class_<DomainEvalFn>(m, "DomainEvalFn")
      .def_property_readonly("id", &DomainEvalFn::id)
      .def_property_readonly("family", &DomainEvalFn::family)
      .def("distance", [](const DomainEvalFn& f, std::string_view v) {
        return f.distance(normalize_value(v));
      })
      .def("describe", &DomainEvalFn::describe)
      .def("__repr__", [](const DomainEvalFn& f) { return "DomainEvalFn(" + f.id() + ")"; });

  m.def("make_pattern_fn", &make_pattern_fn);
  m.def("make_validator_fn", &make_validator_fn);
  m.def("make_score_table_fn", &make_score_table_fn, py::arg("type_name"), py::arg("scores"),
        py::arg("default_score") = 0.0);
  m.def("make_random_hash_fn", &make_random_hash_fn);
  m.def("make_embedding_fn",
        [](Space s, std::string_view centroid) { return make_embedding_fn(s, centroid); },
        py::arg("space"), py::arg("centroid"));
  m.def("sample_centroids",
        [](const Corpus& c, Space s, std::size_t k, std::uint64_t seed) {
          return sample_centroids(c, s, k, seed);
        },
        py::arg("corpus"), py::arg("space"), py::arg("k"), py::arg("seed"));
  m.def("infer_patterns", &infer_patterns, py::arg("corpus"), py::arg("top_k"));
  m.def("builtin_validators", py::overload_cast<>(&builtin_validators));
  m.def("validator_names", &validator_names);
}

void bind_assess(py::module_& m) {
  py::class_<Sdc>(m, "Sdc")
      .def(py::init([](std::string fn_id, double d_in, double d_out, double m, double conf) {
             return Sdc{make_sdc_id(fn_id, d_in, d_out, m), fn_id, d_in, d_out, m, conf};
           }),
           py::arg("fn_id"), py::arg("d_in"), py::arg("d_out"), py::arg("m"),
           py::arg("confidence") = 0.0)
      .def_readonly("id", &Sdc::id)
      .def_readonly("fn_id", &Sdc::fn_id)
      .def_readonly("d_in", &Sdc::d_in)
      .def_readonly("d_out", &Sdc::d_out)
      .def_readonly("m", &Sdc::m)
      .def_readwrite("confidence", &Sdc::confidence)
      .def(py::self == py::self)
      .def("__repr__", [](const Sdc& s) {
        return "Sdc(" + s.fn_id + ", d_in=" + format_real(s.d_in) + ", d_out=" +
               format_real(s.d_out) + ", m=" + format_real(s.m) + ")";
      });

  py::class_<GridSpec>(m, "GridSpec")
      .def_static("defaults", &GridSpec::defaults)
      .def_readwrite("m_values", &GridSpec::m_values);
  m.def("count_candidates", [](const std::vector<DomainEvalFn>& fns, const GridSpec& g) {
    return count_candidates(fns, g);
  });
  m.def("enumerate_candidates", [](const std::vector<DomainEvalFn>& fns, const GridSpec& g) {
    std::vector<Sdc> out;
    CandidateStream s(fns, g);
    while (auto c = s.next()) out.push_back(*c);
    return out;
  });

  py::class_<ContingencyTable>(m, "ContingencyTable")
      .def(py::init([](std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
        return ContingencyTable{a, b, c, d};
      }))
      .def_readonly("covered_triggered", &ContingencyTable::covered_triggered)
      .def_readonly("covered_not_triggered", &ContingencyTable::covered_not_triggered)
      .def_readonly("notcovered_triggered", &ContingencyTable::notcovered_triggered)
      .def_readonly("notcovered_not_triggered", &ContingencyTable::notcovered_not_triggered)
      .def("coverage", &ContingencyTable::coverage)
      .def("rho", &ContingencyTable::rho)
      .def("rho_bar", &ContingencyTable::rho_bar)
      .def(py::self == py::self);

  py::class_<AssessConfig>(m, "AssessConfig")
      .def(py::init<>())
      .def_readwrite("z", &AssessConfig::z)
      .def_readwrite("h_min", &AssessConfig::h_min)
      .def_readwrite("p_max", &AssessConfig::p_max)
      .def_readwrite("c_thres", &AssessConfig::c_thres)
      .def_readwrite("prune", &AssessConfig::prune);

  py::class_<AssessedSdc>(m, "AssessedSdc")
      .def_readonly("sdc", &AssessedSdc::sdc)
      .def_readonly("table", &AssessedSdc::table)
      .def_readonly("h", &AssessedSdc::h)
      .def_readonly("p", &AssessedSdc::p);

  m.def("cohens_h", [](const ContingencyTable& t) {
    const auto e = cohens_h(t);
    return py::make_tuple(e.h, e.directional);
  });
  m.def("chi_squared_statistic", &chi_squared_statistic);
  m.def("chi_squared_p", &chi_squared_p);
  m.def("wilson_lower_confidence", &wilson_lower_confidence, py::arg("table"),
        py::arg("z") = 1.65);
  m.def("confidence_upper_bound", &confidence_upper_bound, py::arg("coverage"),
        py::arg("z") = 1.65);
  m.def("min_coverage_for_confidence", &min_coverage_for_confidence);
  m.def("build_contingency", &build_contingency, py::arg("sdc"), py::arg("fn"),
        py::arg("corpus"), py::arg("options") = CorpusOptions{});
  m.def("assess",
        [](const std::vector<DomainEvalFn>& fns, const Corpus& corpus, const GridSpec& grid,
           const AssessConfig& cfg, unsigned workers) {
          py::gil_scoped_release release;
          return assess_all(registry_of(fns), grid, corpus, cfg, {}, workers).accepted;
        },
        py::arg("fns"), py::arg("corpus"), py::arg("grid") = GridSpec::defaults(),
        py::arg("config") = AssessConfig{}, py::arg("workers") = 1);
  m.def("r_all_jsonl", &r_all_jsonl);
}

void bind_select(py::module_& m) {
  py::class_<SynthColumn>(m, "SynthColumn")
      .def_readonly("id", &SynthColumn::id)
      .def_readonly("base_column_id", &SynthColumn::base_column_id)
      .def_readonly("injected_value", &SynthColumn::injected_value)
      .def_readonly("injected_index", &SynthColumn::injected_index)
      .def_readonly("values", &SynthColumn::values);
  m.def("build_synthetic_corpus", &build_synthetic_corpus);

  py::class_<CandidateStats>(m, "CandidateStats")
      .def(py::init([](std::string id, std::vector<std::uint32_t> det, double fpr, double conf) {
             std::sort(det.begin(), det.end());
             return CandidateStats{std::move(id), std::move(det), fpr, conf};
           }),
           py::arg("sdc_id"), py::arg("detected"), py::arg("fpr"), py::arg("confidence"))
      .def_readonly("sdc_id", &CandidateStats::sdc_id)
      .def_readonly("detected", &CandidateStats::detected)
      .def_readonly("fpr", &CandidateStats::fpr)
      .def_readonly("confidence", &CandidateStats::confidence);

  py::enum_<Strategy>(m, "Strategy").value("coarse", Strategy::coarse).value("fine", Strategy::fine);

  py::class_<SelectionConfig>(m, "SelectionConfig")
      .def(py::init<>())
      .def_readwrite("b_size", &SelectionConfig::b_size)
      .def_readwrite("b_fpr", &SelectionConfig::b_fpr)
      .def_readwrite("delta", &SelectionConfig::delta)
      .def_readwrite("strategy", &SelectionConfig::strategy)
      .def_readwrite("seed", &SelectionConfig::seed)
      .def_readwrite("enforce_budgets", &SelectionConfig::enforce_budgets);

  py::class_<IlpProblem>(m, "IlpProblem")
      .def_readonly("candidate_ids", &IlpProblem::candidate_ids)
      .def_readonly("fprs", &IlpProblem::fprs)
      .def_readonly("cover_sets", &IlpProblem::cover_sets)
      .def_readonly("b_size", &IlpProblem::b_size)
      .def_readonly("b_fpr", &IlpProblem::b_fpr);

  py::class_<LpSolution>(m, "LpSolution")
      .def_readonly("x", &LpSolution::x)
      .def_readonly("objective", &LpSolution::objective)
      .def_readonly("iterations", &LpSolution::iterations);

  py::class_<SelectionResult>(m, "SelectionResult")
      .def_readonly("problem", &SelectionResult::problem)
      .def_readonly("lp", &SelectionResult::lp)
      .def_readonly("selected", &SelectionResult::selected)
      .def_readonly("covered", &SelectionResult::covered)
      .def_readonly("total_fpr", &SelectionResult::total_fpr);

  m.def("column_confidences", [](const std::vector<CandidateStats>& s, std::size_t n) {
    return column_confidences(s, n);
  });
  m.def("build_css_ilp", [](const std::vector<CandidateStats>& s, std::size_t n,
                            const SelectionConfig& c) { return build_css_ilp(s, n, c); });
  m.def("build_fss_ilp", [](const std::vector<CandidateStats>& s, const std::vector<double>& conf,
                            const SelectionConfig& c) { return build_fss_ilp(s, conf, c); });
  m.def("solve_lp_relaxation", &solve_lp_relaxation);
  m.def("randomized_round", &randomized_round);
  m.def("brute_force_ilp", [](const IlpProblem& p) {
    const auto o = brute_force_ilp(p);
    return py::make_tuple(o.objective, o.chosen);
  });
  m.def("covered_columns", [](const IlpProblem& p, const std::vector<std::uint32_t>& chosen) {
    return covered_columns(p, chosen);
  });
  m.def("select_sdcs", [](const std::vector<CandidateStats>& s, std::size_t n,
                          const SelectionConfig& c) { return select_sdcs(s, n, c); });
}

void bind_infer_eval(py::module_& m) {
  py::class_<Detection>(m, "Detection")
      .def_readonly("column_id", &Detection::column_id)
      .def_readonly("value_index", &Detection::value_index)
      .def_readonly("value", &Detection::value)
      .def_readonly("confidence", &Detection::confidence)
      .def_readonly("sdc_id", &Detection::sdc_id)
      .def_readonly("explanation", &Detection::explanation)
      .def(py::self == py::self);

  py::class_<CompiledRuleset>(m, "CompiledRuleset")
      .def(py::init([](const std::vector<Sdc>& sdcs, const std::vector<DomainEvalFn>& fns) {
        return compile_ruleset(sdcs, registry_of(fns));
      }))
      .def_property_readonly("num_groups", [](const CompiledRuleset& r) { return r.groups.size(); })
      .def("detect",
           [](const CompiledRuleset& r, const Column& c) { return detect_errors(r, c); })
      .def("detect_naive",
           [](const CompiledRuleset& r, const Column& c) { return detect_errors_naive(r, c); })
      .def("detect_corpus",
           [](const CompiledRuleset& r, const Corpus& c, double min_conf, unsigned workers) {
             py::gil_scoped_release release;
             return detect_corpus(r, c, min_conf, {}, workers);
           },
           py::arg("corpus"), py::arg("min_confidence") = 0.0, py::arg("workers") = 1);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def(py::init<>())
      .def_readwrite("dirty", &GroundTruth::dirty)
      .def("is_error", &GroundTruth::is_error)
      .def("num_errors", &GroundTruth::num_errors);

  py::class_<PrPoint>(m, "PrPoint")
      .def(py::init([](double t, double p, double r) { return PrPoint{t, p, r}; }))
      .def_readonly("threshold", &PrPoint::threshold)
      .def_readonly("precision", &PrPoint::precision)
      .def_readonly("recall", &PrPoint::recall);

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("pr_auc", &Metrics::pr_auc)
      .def_readonly("f1_at_p08", &Metrics::f1_at_p08)
      .def_readonly("points", &Metrics::points);

  m.def("inject_errors", &inject_errors, py::arg("corpus"), py::arg("truth"), py::arg("rate"),
        py::arg("seed"));
  m.def("pr_curve", [](const std::vector<Detection>& r, const GroundTruth& t) {
    return pr_curve(r, t);
  });
  m.def("pr_auc", [](const std::vector<PrPoint>& p) { return pr_auc(p); });
  m.def("f1_at_precision", [](const std::vector<PrPoint>& p, double p0) {
    return f1_at_precision(p, p0);
  }, py::arg("points"), py::arg("p0") = 0.8);
  m.def("evaluate_report", [](const std::vector<Detection>& r, const GroundTruth& t) {
    return evaluate_report(r, t);
  });
  m.def("zscore_baseline", &zscore_baseline, py::arg("fn"), py::arg("column"),
        py::arg("z_thresh"), py::arg("options") = CorpusOptions{});
}

void bind_pipeline(py::module_& m) {
  py::class_<DemoOptions>(m, "DemoOptions")
      .def(py::init<>())
      .def_readwrite("columns", &DemoOptions::columns)
      .def_readwrite("min_length", &DemoOptions::min_length)
      .def_readwrite("max_length", &DemoOptions::max_length)
      .def_readwrite("seed", &DemoOptions::seed)
      .def_readwrite("vocabulary_domains", &DemoOptions::vocabulary_domains)
      .def_readwrite("embedding_dim", &DemoOptions::embedding_dim);
  py::class_<DemoData>(m, "DemoData")
      .def_readonly("corpus", &DemoData::corpus)
      .def_readonly("domains", &DemoData::domains)
      .def_property_readonly("embedding", [](const DemoData& d) { return unconst(d.embedding); })
      .def_readonly("score_tables", &DemoData::score_tables);
  m.def("make_demo_data", &make_demo_data);
  m.def("write_demo_files", &write_demo_files);

  // Pipeline driven by a config file, mirroring the command line.
  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def_static("load", &load_config)
      .def_static("from_json", [](const std::string& text, const std::filesystem::path& base) {
        return config_from_json(json::parse(text), base);
      }, py::arg("text"), py::arg("base_dir") = std::filesystem::path{})
      .def("to_json", [](const PipelineConfig& c) { return config_to_json(c).dump(); })
      .def("hash", &config_hash)
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("workers", &PipelineConfig::workers)
      .def_readwrite("selection", &PipelineConfig::selection)
      .def_readwrite("assess", &PipelineConfig::assess)
      .def_readwrite("random_hash_count", &PipelineConfig::random_hash_count)
      .def_readwrite("pattern_top_k", &PipelineConfig::pattern_top_k);

  py::class_<GenResult>(m, "GenResult")
      .def_readonly("training", &GenResult::training)
      .def_property_readonly("functions", [](const GenResult& g) { return g.fns.functions(); })
      .def_property_readonly("r_all", [](const GenResult& g) { return g.assessed.accepted; });

  py::class_<SdcStore>(m, "SdcStore")
      .def_readonly("sdcs", &SdcStore::sdcs)
      .def_readonly("config_hash", &SdcStore::config_hash)
      .def_property_readonly("functions", [](const SdcStore& s) { return s.fns.functions(); })
      .def("to_json", [](const SdcStore& s) { return store_to_json(s).dump(2); })
      .def_static("from_json", [](const std::string& text, const std::filesystem::path& base) {
        return store_from_json(json::parse(text), base);
      }, py::arg("text"), py::arg("base_dir") = std::filesystem::path{});

  py::class_<SelectRun>(m, "SelectRun")
      .def_readonly("synthetic", &SelectRun::synth)
      .def_readonly("stats", &SelectRun::stats)
      .def_readonly("selection", &SelectRun::selection)
      .def_readonly("store", &SelectRun::store);

  m.def("run_gen", [](const PipelineConfig& cfg, const Corpus& raw) {
    py::gil_scoped_release release;
    return run_gen(cfg, raw);
  });
  m.def("run_gen_with", [](const PipelineConfig& cfg, const Corpus& raw,
                           const std::vector<DomainEvalFn>& fns) {
    py::gil_scoped_release release;
    return run_gen(cfg, raw, registry_of(fns));
  });
  m.def("run_select", [](const PipelineConfig& cfg, const GenResult& gen) {
    py::gil_scoped_release release;
    return run_select(cfg, gen.fns, gen.assessed.accepted, gen.training);
  });
  m.def("run_infer", [](const SdcStore& store, const Corpus& corpus, double min_conf,
                        unsigned workers) {
    py::gil_scoped_release release;
    return run_infer(store, corpus, min_conf, {}, workers);
  }, py::arg("store"), py::arg("corpus"), py::arg("min_confidence") = 0.0, py::arg("workers") = 1);
}

}  // namespace

PYBIND11_MODULE(_autotest, m) {
  m.doc() = "Semantic-domain constraints for table error detection";
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<LpError>(m, "LpError", PyExc_RuntimeError);
  bind_corpus(m);
  bind_functions(m);
  bind_assess(m);
  bind_select(m);
  bind_infer_eval(m);
  bind_pipeline(m);
}
