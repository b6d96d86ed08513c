#include "autotest/synth.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>

#include "autotest/common.hpp"
#include "json.hpp"
#include "profile.hpp"

namespace autotest {

using json = nlohmann::json;

namespace {

constexpr int kDonorRetries = 16;

}  // namespace

std::vector<SynthColumn> build_synthetic_corpus(const Corpus& corpus,
                                                std::size_t n,
                                                std::uint64_t seed) {
  if (n == 0) return {};
  if (corpus.size() < 2) {
    throw DataError("synthetic corpus needs at least 2 columns");
  }
  Rng rng(seed);
  std::vector<SynthColumn> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t base = rng.uniform_index(corpus.size());
    const Column& base_col = corpus[base];
    std::unordered_set<std::string> present;
    for (const auto& v : base_col.values) {
      present.insert(normalize_value(v).trimmed_lower);
    }
    std::string donor_value;
    bool found = false;
    for (int attempt = 0; attempt < kDonorRetries && !found; ++attempt) {
      std::size_t donor = rng.uniform_index(corpus.size() - 1);
      if (donor >= base) ++donor;
      const Column& donor_col = corpus[donor];
      donor_value = donor_col.values[rng.uniform_index(donor_col.values.size())];
      found = present.count(normalize_value(donor_value).trimmed_lower) == 0;
    }
    if (!found) continue;
    const std::size_t pos = rng.uniform_index(base_col.values.size() + 1);
    SynthColumn s;
    s.id = "syn:" + std::to_string(k);
    s.base_column_id = base_col.id;
    s.injected_value = donor_value;
    s.injected_index = pos;
    s.values = base_col.values;
    s.values.insert(s.values.begin() + static_cast<std::ptrdiff_t>(pos),
                    donor_value);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::uint32_t> detection_set(const Sdc& sdc,
                                         const DomainEvalFn& fn,
                                         std::span<const SynthColumn> synth,
                                         const CorpusOptions& opts) {
  std::vector<std::uint32_t> out;
  for (std::size_t j = 0; j < synth.size(); ++j) {
    const auto values = evaluation_values(synth[j].as_column(), opts);
    if (!eval_precondition(sdc, fn, values)) continue;
    const double d = fn.distance(values[synth[j].injected_index]);
    if (outside_outer_ball(fn.family(), d, sdc.d_out)) {
      out.push_back(static_cast<std::uint32_t>(j));
    }
  }
  return out;
}

double estimate_fpr(const ContingencyTable& table, std::uint64_t corpus_size) {
  if (corpus_size == 0) throw DataError("estimate_fpr: empty corpus");
  return static_cast<double>(table.covered_triggered) /
         static_cast<double>(corpus_size);
}

std::vector<CandidateStats> compute_candidate_stats(
    std::span<const AssessedSdc> assessed, const FunctionRegistry& fns,
    std::span<const SynthColumn> synth, std::uint64_t corpus_size,
    const CorpusOptions& opts, unsigned workers) {
  std::vector<CandidateStats> out(assessed.size());
  std::map<std::string, std::vector<std::size_t>> by_fn;
  for (std::size_t i = 0; i < assessed.size(); ++i) {
    by_fn[assessed[i].sdc.fn_id].push_back(i);
    out[i].sdc_id = assessed[i].sdc.id;
    out[i].fpr = estimate_fpr(assessed[i].table, corpus_size);
    out[i].confidence = assessed[i].sdc.confidence;
  }

  for (const auto& [fn_id, members] : by_fn) {
    const DomainEvalFn& fn = fns.at(fn_id);
    std::vector<detail::DistanceProfile> profiles(synth.size());
    std::vector<double> injected(synth.size());
    parallel_for(synth.size(), workers, [&](std::size_t j) {
      const auto values = evaluation_values(synth[j].as_column(), opts);
      profiles[j] = detail::make_profile(fn, values);
      injected[j] = fn.distance(values[synth[j].injected_index]);
    });
    parallel_for(members.size(), workers, [&](std::size_t k) {
      const Sdc& sdc = assessed[members[k]].sdc;
      auto& detected = out[members[k]].detected;
      for (std::size_t j = 0; j < synth.size(); ++j) {
        if (outside_outer_ball(fn.family(), injected[j], sdc.d_out) &&
            profiles[j].covered(sdc.d_in, sdc.m)) {
          detected.push_back(static_cast<std::uint32_t>(j));
        }
      }
    });
  }
  return out;
}

void write_synthetic_corpus(std::span<const SynthColumn> synth,
                            const std::filesystem::path& corpus_path,
                            const std::filesystem::path& sidecar_path) {
  for (const auto& p : {corpus_path, sidecar_path}) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream corpus_out(corpus_path);
  std::ofstream sidecar_out(sidecar_path);
  if (!corpus_out || !sidecar_out) {
    throw DataError("cannot write synthetic corpus files");
  }
  for (const auto& s : synth) {
    corpus_out << json{{"id", s.id}, {"values", s.values}}.dump() << '\n';
    sidecar_out << json{{"id", s.id},
                        {"base_column_id", s.base_column_id},
                        {"injected_index", s.injected_index},
                        {"injected_value", s.injected_value}}
                       .dump()
                << '\n';
  }
}

}  // namespace autotest
