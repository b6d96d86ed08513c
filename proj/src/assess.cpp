#include "autotest/assess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <unordered_map>

#include "autotest/common.hpp"
#include "profile.hpp"

namespace autotest {

double ContingencyTable::rho() const {
  return static_cast<double>(covered_triggered) /
         static_cast<double>(coverage());
}

double ContingencyTable::rho_bar() const {
  return static_cast<double>(notcovered_triggered) /
         static_cast<double>(not_covered());
}

bool fraction_meets(std::size_t count, std::size_t n, double m) {
  if (n == 0) return false;
  return static_cast<double>(count) / static_cast<double>(n) >= m;
}

bool outside_outer_ball(Family family, double distance, double d_out) {
  return is_binary(family) ? distance >= d_out : distance > d_out;
}

bool eval_precondition(const Sdc& sdc, const DomainEvalFn& fn,
                       std::span<const NormalizedValue> values) {
  std::size_t inside = 0;
  for (const auto& v : values) {
    if (fn.distance(v) <= sdc.d_in) ++inside;
  }
  return fraction_meets(inside, values.size(), sdc.m);
}

std::vector<std::size_t> eval_postcondition(
    const Sdc& sdc, const DomainEvalFn& fn,
    std::span<const NormalizedValue> values) {
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (outside_outer_ball(fn.family(), fn.distance(values[i]), sdc.d_out)) {
      flagged.push_back(i);
    }
  }
  return flagged;
}

ContingencyTable build_contingency(const Sdc& sdc, const DomainEvalFn& fn,
                                   const Corpus& corpus,
                                   const CorpusOptions& opts) {
  ContingencyTable t;
  for (const auto& column : corpus) {
    const auto values = evaluation_values(column, opts);
    const bool covered = eval_precondition(sdc, fn, values);
    const bool triggered = !eval_postcondition(sdc, fn, values).empty();
    if (covered) {
      ++(triggered ? t.covered_triggered : t.covered_not_triggered);
    } else {
      ++(triggered ? t.notcovered_triggered : t.notcovered_not_triggered);
    }
  }
  return t;
}

EffectSize cohens_h(const ContingencyTable& table) {
  if (table.coverage() == 0 || table.not_covered() == 0) {
    throw DataError("cohens_h: a covered/uncovered group is empty");
  }
  const double rho = table.rho();
  const double rho_bar = table.rho_bar();
  const double h =
      2.0 * (std::asin(std::sqrt(rho)) - std::asin(std::sqrt(rho_bar)));
  return EffectSize{std::abs(h), rho < rho_bar};
}

double chi_squared_statistic(const ContingencyTable& table) {
  const double a = static_cast<double>(table.covered_triggered);
  const double b = static_cast<double>(table.covered_not_triggered);
  const double c = static_cast<double>(table.notcovered_triggered);
  const double d = static_cast<double>(table.notcovered_not_triggered);
  const double row1 = a + b;
  const double row2 = c + d;
  const double col1 = a + c;
  const double col2 = b + d;
  if (row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0) return 0.0;
  const double n = row1 + row2;
  const double diff = a * d - b * c;
  // Divide stepwise; the product of margins overflows nothing but loses
  // less precision this way on large corpora.
  return n * (diff / row1) * (diff / row2) / col1 / col2;
}

double chi_squared_p(const ContingencyTable& table) {
  const double stat = chi_squared_statistic(table);
  if (stat <= 0.0) return 1.0;
  // Survival function of chi^2 with one degree of freedom.
  return std::erfc(std::sqrt(stat / 2.0));
}

double wilson_lower_confidence(const ContingencyTable& table, double z) {
  const double n_c = static_cast<double>(table.coverage());
  if (n_c == 0) throw DataError("wilson_lower_confidence: coverage is zero");
  const double n_ct = static_cast<double>(table.covered_triggered);
  const double n_cnt = static_cast<double>(table.covered_not_triggered);
  const double z2 = z * z;
  const double denom = n_c + z2;
  return 1.0 - (n_ct + z2 / 2.0) / denom -
         (z / denom) * std::sqrt(n_ct * n_cnt / n_c + z2 / 4.0);
}

double confidence_upper_bound(std::uint64_t coverage, double z) {
  const double z2 = z * z;
  return 1.0 - z2 / (static_cast<double>(coverage) + z2);
}

std::uint64_t min_coverage_for_confidence(double c_thres, double z) {
  if (c_thres <= 0.0) return 0;
  if (c_thres >= 1.0) return std::numeric_limits<std::uint64_t>::max();
  const double exact = z * z * c_thres / (1.0 - c_thres);
  auto n = static_cast<std::uint64_t>(std::ceil(exact));
  // Settle rounding so the result agrees with the bound itself.
  while (n > 0 && confidence_upper_bound(n - 1, z) >= c_thres) --n;
  while (confidence_upper_bound(n, z) < c_thres) ++n;
  return n;
}

namespace {

enum class Outcome : std::uint8_t {
  failed_coverage,
  failed_effect_size,
  failed_significance,
  failed_confidence,
  accepted,
};

struct Slot {
  Outcome outcome = Outcome::failed_coverage;
  AssessedSdc assessed;
};

// Coverage threshold used to reject early. Lowered past any count whose
// zero-trigger Wilson value still reaches c_thres, so the early rejection
// can never disagree with the confidence gate.
std::uint64_t coverage_floor(const AssessConfig& cfg) {
  std::uint64_t n = min_coverage_for_confidence(cfg.c_thres, cfg.z);
  auto wilson_zero = [&](std::uint64_t cov) {
    ContingencyTable t;
    t.covered_not_triggered = cov;
    return wilson_lower_confidence(t, cfg.z);
  };
  while (n > 1 && wilson_zero(n - 1) >= cfg.c_thres) --n;
  return n;
}

void finish_gates(const AssessConfig& cfg, Slot& slot) {
  const ContingencyTable& t = slot.assessed.table;
  if (t.coverage() == 0 || t.not_covered() == 0) {
    slot.outcome = Outcome::failed_effect_size;
    return;
  }
  const EffectSize effect = cohens_h(t);
  slot.assessed.h = effect.h;
  if (!effect.directional || effect.h < cfg.h_min) {
    slot.outcome = Outcome::failed_effect_size;
    return;
  }
  slot.assessed.p = chi_squared_p(t);
  if (slot.assessed.p > cfg.p_max) {
    slot.outcome = Outcome::failed_significance;
    return;
  }
  const double c = wilson_lower_confidence(t, cfg.z);
  slot.assessed.sdc.confidence = c;
  slot.outcome =
      c >= cfg.c_thres ? Outcome::accepted : Outcome::failed_confidence;
}

// Assesses candidates that all share `fn`, writing into `slots` (parallel to
// `batch`).
void assess_batch(const std::vector<const Sdc*>& batch, const DomainEvalFn& fn,
                  const Corpus& corpus, const AssessConfig& cfg,
                  const CorpusOptions& opts, unsigned workers,
                  std::vector<Slot>& slots, std::size_t& skipped) {
  const auto profiles = detail::build_profiles(fn, corpus, opts, workers);
  const std::uint64_t floor = coverage_floor(cfg);

  // Candidates with the same (d_out, m) nest by d_in: a smaller inner radius
  // covers a subset of the columns, so once coverage drops under the floor
  // every smaller d_in does too.
  std::map<std::pair<double, double>, std::vector<std::size_t>> chains;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    chains[{batch[i]->d_out, batch[i]->m}].push_back(i);
  }
  std::vector<std::vector<std::size_t>> chain_list;
  chain_list.reserve(chains.size());
  for (auto& [key, members] : chains) {
    std::stable_sort(members.begin(), members.end(),
                     [&](std::size_t a, std::size_t b) {
                       return batch[a]->d_in > batch[b]->d_in;
                     });
    chain_list.push_back(std::move(members));
  }

  std::vector<std::size_t> skipped_per_chain(chain_list.size(), 0);
  parallel_for(chain_list.size(), workers, [&](std::size_t c) {
    const auto& members = chain_list[c];
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      const Sdc& sdc = *batch[members[pos]];
      Slot& slot = slots[members[pos]];
      slot.assessed.sdc = sdc;

      if (cfg.prune) {
        std::uint64_t coverage = 0;
        for (const auto& p : profiles) {
          if (p.covered(sdc.d_in, sdc.m)) ++coverage;
        }
        if (coverage < floor) {
          slot.outcome = Outcome::failed_coverage;
          for (std::size_t rest = pos + 1; rest < members.size(); ++rest) {
            Slot& s = slots[members[rest]];
            s.assessed.sdc = *batch[members[rest]];
            s.outcome = Outcome::failed_coverage;
            ++skipped_per_chain[c];
          }
          break;
        }
      }

      ContingencyTable t;
      for (const auto& p : profiles) {
        const bool covered = p.covered(sdc.d_in, sdc.m);
        const bool triggered = p.triggered(fn.family(), sdc.d_out);
        if (covered) {
          ++(triggered ? t.covered_triggered : t.covered_not_triggered);
        } else {
          ++(triggered ? t.notcovered_triggered : t.notcovered_not_triggered);
        }
      }
      if (t.coverage() < floor) {
        slot.outcome = Outcome::failed_coverage;
        continue;
      }
      slot.assessed.table = t;
      finish_gates(cfg, slot);
    }
  });
  for (std::size_t s : skipped_per_chain) skipped += s;
}

void tally(const std::vector<Slot>& slots, AssessResult& result) {
  for (const auto& slot : slots) {
    ++result.gates.candidates;
    if (slot.outcome == Outcome::failed_coverage) continue;
    ++result.gates.passed_coverage;
    if (slot.outcome == Outcome::failed_effect_size) continue;
    ++result.gates.passed_effect_size;
    if (slot.outcome == Outcome::failed_significance) continue;
    ++result.gates.passed_significance;
    if (slot.outcome == Outcome::failed_confidence) continue;
    ++result.gates.passed_confidence;
    result.accepted.push_back(slot.assessed);
  }
}

void sort_by_id(std::vector<AssessedSdc>& v) {
  std::sort(v.begin(), v.end(), [](const AssessedSdc& a, const AssessedSdc& b) {
    return a.sdc.id < b.sdc.id;
  });
}

}  // namespace

AssessResult assess_candidates(std::span<const Sdc> candidates,
                               const FunctionRegistry& fns,
                               const Corpus& corpus, const AssessConfig& cfg,
                               const CorpusOptions& opts, unsigned workers) {
  std::map<std::string, std::vector<const Sdc*>> by_fn;
  for (const auto& sdc : candidates) {
    fns.at(sdc.fn_id);
    by_fn[sdc.fn_id].push_back(&sdc);
  }
  AssessResult result;
  for (const auto& [fn_id, batch] : by_fn) {
    std::vector<Slot> slots(batch.size());
    assess_batch(batch, fns.at(fn_id), corpus, cfg, opts, workers, slots,
                 result.gates.skipped_by_subspace);
    tally(slots, result);
  }
  sort_by_id(result.accepted);
  return result;
}

AssessResult assess_all(const FunctionRegistry& fns, const GridSpec& grid,
                        const Corpus& corpus, const AssessConfig& cfg,
                        const CorpusOptions& opts, unsigned workers) {
  CandidateStream stream(fns.functions(), grid);
  AssessResult result;
  std::vector<Sdc> batch;
  auto flush = [&] {
    if (batch.empty()) return;
    std::vector<const Sdc*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& s : batch) ptrs.push_back(&s);
    std::vector<Slot> slots(batch.size());
    assess_batch(ptrs, fns.at(batch.front().fn_id), corpus, cfg, opts,
                 workers, slots, result.gates.skipped_by_subspace);
    tally(slots, result);
    batch.clear();
  };
  while (auto sdc = stream.next()) {
    if (!batch.empty() && batch.front().fn_id != sdc->fn_id) flush();
    batch.push_back(std::move(*sdc));
  }
  flush();
  sort_by_id(result.accepted);
  return result;
}

}  // namespace autotest
