#include "autotest/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

#include "autotest/common.hpp"
#include "json.hpp"

namespace autotest {

using json = nlohmann::json;

bool GroundTruth::is_error(const std::string& column_id,
                           std::size_t index) const {
  auto it = dirty.find(column_id);
  return it != dirty.end() && it->second.count(index) > 0;
}

std::size_t GroundTruth::num_errors() const {
  std::size_t n = 0;
  for (const auto& [_, idx] : dirty) n += idx.size();
  return n;
}

GroundTruth load_ground_truth(std::istream& in) {
  GroundTruth truth;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      auto& set = truth.dirty[j.at("column_id").get<std::string>()];
      for (const auto& i : j.at("indices")) set.insert(i.get<std::size_t>());
    } catch (const json::exception& e) {
      throw DataError("truth line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return load_ground_truth(in);
}

void write_ground_truth(const GroundTruth& truth, std::ostream& out) {
  for (const auto& [id, idx] : truth.dirty) {
    if (idx.empty()) continue;
    out << json{{"column_id", id},
                {"indices", std::vector<std::size_t>(idx.begin(), idx.end())}}
               .dump()
        << '\n';
  }
}

void write_ground_truth(const GroundTruth& truth,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_ground_truth(truth, out);
}

std::pair<Corpus, GroundTruth> inject_errors(const Corpus& corpus,
                                             const GroundTruth& truth,
                                             double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("injection rate must lie in [0, 1]");
  }
  const auto k = static_cast<std::size_t>(
      std::floor(rate * static_cast<double>(corpus.size()) + 1e-9));
  if (rate > 0.0 && corpus.size() < 2) {
    throw DataError("error injection needs at least 2 columns");
  }
  Rng rng(seed);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  order.resize(k);
  std::sort(order.begin(), order.end());

  std::vector<Column> cols(corpus.begin(), corpus.end());
  GroundTruth out_truth = truth;
  for (std::size_t base : order) {
    Column& col = cols[base];
    std::unordered_set<std::string> present;
    for (const auto& v : col.values) present.insert(normalize_value(v).trimmed_lower);
    std::string value;
    for (int attempt = 0; attempt < 16; ++attempt) {
      std::size_t donor = rng.uniform_index(corpus.size() - 1);
      if (donor >= base) ++donor;
      const auto& dv = corpus[donor].values;
      value = dv[rng.uniform_index(dv.size())];
      if (!present.count(normalize_value(value).trimmed_lower)) break;
    }
    const std::size_t pos = rng.uniform_index(col.values.size() + 1);
    col.values.insert(col.values.begin() + static_cast<std::ptrdiff_t>(pos), value);
    auto& labels = out_truth.dirty[col.id];
    std::set<std::size_t> shifted;
    for (auto i : labels) shifted.insert(i >= pos ? i + 1 : i);
    shifted.insert(pos);
    labels = std::move(shifted);
  }
  Corpus result;
  for (auto& c : cols) result.add(std::move(c));
  return {std::move(result), std::move(out_truth)};
}

std::vector<PrPoint> pr_curve(std::span<const Detection> report,
                              const GroundTruth& truth) {
  // A cell reported more than once counts once, at its best confidence.
  std::map<std::pair<std::string_view, std::size_t>, const Detection*> cells;
  for (const auto& d : report) {
    if (!std::isfinite(d.confidence)) {
      throw std::invalid_argument("report confidence is not finite");
    }
    auto [it, fresh] = cells.try_emplace({d.column_id, d.value_index}, &d);
    if (!fresh && d.confidence > it->second->confidence) it->second = &d;
  }
  std::vector<const Detection*> ranked;
  ranked.reserve(cells.size());
  for (const auto& d : report) {
    if (cells.at({d.column_id, d.value_index}) == &d) ranked.push_back(&d);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](auto a, auto b) {
    return a->confidence > b->confidence;
  });
  const double total = static_cast<double>(truth.num_errors());
  std::vector<PrPoint> points;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (truth.is_error(ranked[i]->column_id, ranked[i]->value_index)) ++tp;
    const bool last_of_band =
        i + 1 == ranked.size() || ranked[i + 1]->confidence != ranked[i]->confidence;
    if (!last_of_band) continue;
    points.push_back(PrPoint{ranked[i]->confidence,
                             static_cast<double>(tp) / static_cast<double>(i + 1),
                             total > 0 ? static_cast<double>(tp) / total : 0.0});
  }
  return points;
}

double pr_auc(std::span<const PrPoint> points) {
  if (points.empty()) return 0.0;
  double area = 0.0;
  double r0 = 0.0;
  double p0 = points.front().precision;
  for (const auto& p : points) {
    area += (p.recall - r0) * (p.precision + p0) / 2.0;
    r0 = p.recall;
    p0 = p.precision;
  }
  return std::clamp(area, 0.0, 1.0);
}

double f1_at_precision(std::span<const PrPoint> points, double p0) {
  const PrPoint* best = nullptr;
  for (const auto& p : points) {
    if (p.precision >= p0 && (!best || p.recall > best->recall)) best = &p;
  }
  if (!best || best->precision + best->recall == 0.0) return 0.0;
  return 2.0 * best->precision * best->recall / (best->precision + best->recall);
}

namespace {

std::vector<double> substituted_distances(const DomainEvalFn& fn,
                                          const std::vector<NormalizedValue>& values) {
  std::vector<double> d;
  d.reserve(values.size());
  double max_finite = -1.0;
  for (const auto& v : values) {
    d.push_back(fn.distance(v));
    if (std::isfinite(d.back())) max_finite = std::max(max_finite, d.back());
  }
  const double fill = max_finite > 0.0 ? 2.0 * max_finite : 1.0;
  for (auto& x : d) {
    if (!std::isfinite(x)) x = fill;
  }
  return d;
}

std::vector<Detection> zscore_on_values(const DomainEvalFn& fn,
                                        const Column& column,
                                        const std::vector<NormalizedValue>& values,
                                        double z_thresh) {
  std::vector<Detection> out;
  if (values.size() < 2) return out;
  const auto d = substituted_distances(fn, values);
  const double n = static_cast<double>(d.size());
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double var = 0.0;
  for (double x : d) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0.0)) return out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double z = (d[i] - mean) / sd;
    if (z > z_thresh) {
      out.push_back(Detection{column.id, i, column.values[i], z,
                              "zscore:" + fn.id(),
                              "z-score " + format_real(std::round(z * 1e4) / 1e4) +
                                  " under " + fn.describe()});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.confidence > b.confidence;
  });
  return out;
}

std::size_t best_fitting_on_values(std::span<const DomainEvalFn> fns,
                                   const std::vector<NormalizedValue>& values) {
  std::size_t best = 0;
  std::size_t best_finite = 0;
  double best_mean = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < fns.size(); ++k) {
    std::size_t finite = 0;
    double sum = 0.0;
    for (const auto& v : values) {
      const double x = fns[k].distance(v);
      if (std::isfinite(x)) {
        ++finite;
        sum += x;
      }
    }
    const double mean = finite ? sum / static_cast<double>(finite)
                               : std::numeric_limits<double>::infinity();
    const bool better =
        k == 0 || finite > best_finite ||
        (finite == best_finite &&
         (mean < best_mean ||
          (mean == best_mean && fns[k].id() < fns[best].id())));
    if (better) {
      best = k;
      best_finite = finite;
      best_mean = mean;
    }
  }
  return best;
}

}  // namespace

std::vector<Detection> zscore_baseline(const DomainEvalFn& fn,
                                       const Column& column, double z_thresh,
                                       const CorpusOptions& opts) {
  return zscore_on_values(fn, column, evaluation_values(column, opts), z_thresh);
}

std::size_t best_fitting_fn(std::span<const DomainEvalFn> fns,
                            const Column& column, const CorpusOptions& opts) {
  if (fns.empty()) throw std::invalid_argument("no functions to choose from");
  return best_fitting_on_values(fns, evaluation_values(column, opts));
}

std::vector<Detection> zscore_report(std::span<const DomainEvalFn> fns,
                                     const Corpus& corpus,
                                     const CorpusOptions& opts,
                                     unsigned workers) {
  if (fns.empty()) return {};
  std::vector<std::vector<Detection>> per_column(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t c) {
    const Column& col = corpus[c];
    if (opts.skip_numeric_columns &&
        is_numeric_dominant(col, opts.numeric_fraction)) {
      return;
    }
    const auto values = evaluation_values(col, opts);
    const auto& fn = fns[best_fitting_on_values(fns, values)];
    per_column[c] = zscore_on_values(fn, col, values,
                                     -std::numeric_limits<double>::infinity());
  });
  std::vector<Detection> out;
  for (auto& dets : per_column) {
    std::move(dets.begin(), dets.end(), std::back_inserter(out));
  }
  return out;
}

Metrics evaluate_report(std::span<const Detection> report,
                        const GroundTruth& truth) {
  Metrics m;
  m.points = pr_curve(report, truth);
  m.pr_auc = pr_auc(m.points);
  m.f1_at_p08 = f1_at_precision(m.points, 0.8);
  return m;
}

std::vector<BaselineScore> rank_zscore_baselines(
    std::span<const DomainEvalFn> fns, const Corpus& corpus,
    const GroundTruth& truth, const CorpusOptions& opts, unsigned workers) {
  std::vector<BaselineScore> out;
  for (Family fam : {Family::score_table, Family::embedding, Family::pattern,
                     Family::validator, Family::random_hash}) {
    std::vector<DomainEvalFn> members;
    for (const auto& f : fns) {
      if (f.family() == fam) members.push_back(f);
    }
    if (members.empty()) continue;
    const auto report = zscore_report(members, corpus, opts, workers);
    out.push_back({"zscore:" + std::string(to_string(fam)),
                   evaluate_report(report, truth)});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.metrics.pr_auc > b.metrics.pr_auc;
  });
  return out;
}

}  // namespace autotest
