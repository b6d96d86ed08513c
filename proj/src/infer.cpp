#include "autotest/infer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "autotest/assess.hpp"
#include "autotest/common.hpp"

namespace autotest {

namespace {

std::string short_real(double v) {
  if (!std::isfinite(v)) return format_real(v);
  return format_real(std::round(v * 1e4) / 1e4);
}

struct Flag {
  double confidence = -1.0;
  const Sdc* sdc = nullptr;
  double distance = 0.0;
};

void offer(std::map<std::size_t, Flag>& flags, std::size_t index,
           const Sdc& sdc, double distance) {
  Flag& f = flags[index];
  if (sdc.confidence > f.confidence ||
      (sdc.confidence == f.confidence && f.sdc && sdc.id < f.sdc->id)) {
    f = Flag{sdc.confidence, &sdc, distance};
  }
}

std::vector<Detection> render(const CompiledRuleset& ruleset,
                              const Column& column,
                              const std::map<std::size_t, Flag>& flags) {
  std::vector<Detection> out;
  out.reserve(flags.size());
  for (const auto& [index, f] : flags) {
    const auto& fn = ruleset.fns[ruleset.fn_index_of(f.sdc->fn_id)];
    const std::string& raw = column.values[index];
    out.push_back(Detection{column.id, index, raw, f.confidence, f.sdc->id,
                            explain(*f.sdc, fn, raw, f.distance)});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.value_index < b.value_index;
  });
  return out;
}

std::vector<double> distances(const DomainEvalFn& fn,
                              const std::vector<NormalizedValue>& values) {
  std::vector<double> d;
  d.reserve(values.size());
  for (const auto& v : values) d.push_back(fn.distance(v));
  return d;
}

bool holds(const std::vector<double>& d, double d_in, double m) {
  const auto within = static_cast<std::size_t>(
      std::count_if(d.begin(), d.end(), [&](double x) { return x <= d_in; }));
  return fraction_meets(within, d.size(), m);
}

}  // namespace

std::size_t CompiledRuleset::fn_index_of(const std::string& fn_id) const {
  auto it = std::lower_bound(
      fns.begin(), fns.end(), fn_id,
      [](const DomainEvalFn& f, const std::string& id) { return f.id() < id; });
  if (it == fns.end() || it->id() != fn_id) {
    throw DataError("ruleset has no function '" + fn_id + "'");
  }
  return static_cast<std::size_t>(it - fns.begin());
}

CompiledRuleset compile_ruleset(std::span<const Sdc> sdcs,
                                const FunctionRegistry& fns) {
  CompiledRuleset r;
  r.sdcs.assign(sdcs.begin(), sdcs.end());
  std::set<std::string> fn_ids;
  for (const auto& s : r.sdcs) fn_ids.insert(s.fn_id);
  for (const auto& id : fn_ids) r.fns.push_back(fns.at(id));

  std::map<std::tuple<std::string, double, double>, std::size_t> index;
  for (std::size_t i = 0; i < r.sdcs.size(); ++i) {
    const Sdc& s = r.sdcs[i];
    auto key = std::make_tuple(s.fn_id, s.d_in, s.m);
    auto [it, fresh] = index.try_emplace(key, 0);
    if (fresh) {
      it->second = r.groups.size();
      r.groups.push_back({s.fn_id, s.d_in, s.m, r.fn_index_of(s.fn_id), {}});
    }
    r.groups[it->second].members.push_back(i);
  }
  std::sort(r.groups.begin(), r.groups.end(), [](const auto& a, const auto& b) {
    return std::tie(a.fn_id, a.d_in, a.m) < std::tie(b.fn_id, b.d_in, b.m);
  });
  return r;
}

std::string explain(const Sdc& sdc, const DomainEvalFn& fn,
                    const std::string& value, double distance) {
  const char* op = is_binary(fn.family()) ? " >= " : " > ";
  return format_real(std::round(sdc.m * 100.0 * 1e6) / 1e6) +
         "% of column values are within " + format_real(sdc.d_in) + " of " +
         fn.describe() + "; '" + value + "' is at distance " +
         short_real(distance) + op + format_real(sdc.d_out);
}

std::vector<Detection> detect_errors(const CompiledRuleset& ruleset,
                                     const Column& column,
                                     const CorpusOptions& opts,
                                     std::uint64_t* precondition_checks) {
  if (ruleset.groups.empty() || column.values.empty()) return {};
  const auto values = evaluation_values(column, opts);
  std::vector<std::vector<double>> cache(ruleset.fns.size());
  std::vector<char> cached(ruleset.fns.size(), 0);
  std::map<std::size_t, Flag> flags;
  for (const auto& g : ruleset.groups) {
    if (!cached[g.fn_index]) {
      cache[g.fn_index] = distances(ruleset.fns[g.fn_index], values);
      cached[g.fn_index] = 1;
    }
    const auto& d = cache[g.fn_index];
    if (precondition_checks) ++*precondition_checks;
    if (!holds(d, g.d_in, g.m)) continue;
    const Family family = ruleset.fns[g.fn_index].family();
    for (auto member : g.members) {
      const Sdc& s = ruleset.sdcs[member];
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (outside_outer_ball(family, d[i], s.d_out)) offer(flags, i, s, d[i]);
      }
    }
  }
  return render(ruleset, column, flags);
}

std::vector<Detection> detect_errors_naive(const CompiledRuleset& ruleset,
                                           const Column& column,
                                           const CorpusOptions& opts,
                                           std::uint64_t* precondition_checks) {
  if (column.values.empty()) return {};
  const auto values = evaluation_values(column, opts);
  std::map<std::size_t, Flag> flags;
  for (const Sdc& s : ruleset.sdcs) {
    const auto& fn = ruleset.fns[ruleset.fn_index_of(s.fn_id)];
    if (precondition_checks) ++*precondition_checks;
    if (!eval_precondition(s, fn, values)) continue;
    for (auto i : eval_postcondition(s, fn, values)) {
      offer(flags, i, s, fn.distance(values[i]));
    }
  }
  return render(ruleset, column, flags);
}

std::vector<Detection> detect_corpus(const CompiledRuleset& ruleset,
                                     const Corpus& corpus,
                                     double min_confidence,
                                     const CorpusOptions& opts,
                                     unsigned workers) {
  std::vector<std::vector<Detection>> per_column(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t c) {
    const Column& col = corpus[c];
    if (opts.skip_numeric_columns &&
        is_numeric_dominant(col, opts.numeric_fraction)) {
      return;
    }
    per_column[c] = detect_errors(ruleset, col, opts);
  });
  std::vector<Detection> out;
  for (auto& dets : per_column) {
    for (auto& d : dets) {
      if (d.confidence >= min_confidence) out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace autotest
