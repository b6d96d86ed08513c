#include "autotest/candidates.hpp"

#include <algorithm>
#include <cmath>

#include "autotest/common.hpp"

namespace autotest {

std::string make_sdc_id(const std::string& fn_id, double d_in, double d_out,
                        double m) {
  const std::string key = fn_id + '|' + format_real(d_in) + '|' +
                          format_real(d_out) + '|' + format_real(m);
  return hex64(fnv1a64(key));
}

std::vector<double> stepped(double first, double last, double step) {
  std::vector<double> out;
  const double dir = last >= first ? 1.0 : -1.0;
  const double magnitude = std::abs(step);
  const auto count =
      static_cast<long>(std::floor(std::abs(last - first) / magnitude + 1e-9));
  for (long i = 0; i <= count; ++i) {
    const double v = first + dir * magnitude * static_cast<double>(i);
    out.push_back(std::round(v * 1e9) / 1e9);
  }
  return out;
}

GridSpec GridSpec::defaults() {
  GridSpec g;
  g.m_values = stepped(1.0, 0.8, 0.05);
  RadiusGrid embedding;
  embedding.d_in = stepped(0.5, 8.0, 0.5);
  embedding.d_out_offsets = {0.5, 1.0, 1.5, 2.0};
  RadiusGrid bounded;
  bounded.d_in = stepped(0.1, 0.5, 0.05);
  bounded.d_out = {0.9, 0.95, 0.99, 1.0};
  g.radii[Family::embedding] = embedding;
  g.radii[Family::score_table] = bounded;
  g.radii[Family::random_hash] = bounded;
  return g;
}

std::vector<std::pair<double, double>> radius_pairs(Family family,
                                                    const GridSpec& grid) {
  if (is_binary(family)) return {{0.0, 1.0}};
  std::vector<std::pair<double, double>> out;
  auto it = grid.radii.find(family);
  if (it == grid.radii.end()) return out;
  const RadiusGrid& r = it->second;
  for (double d_in : r.d_in) {
    if (!r.d_out_offsets.empty()) {
      for (double off : r.d_out_offsets) {
        const double d_out = std::round((d_in + off) * 1e9) / 1e9;
        if (d_out > d_in) out.emplace_back(d_in, d_out);
      }
    } else {
      for (double d_out : r.d_out) {
        if (d_out > d_in) out.emplace_back(d_in, d_out);
      }
    }
  }
  return out;
}

std::size_t count_candidates(std::span<const DomainEvalFn> fns,
                             const GridSpec& grid) {
  std::size_t total = 0;
  for (const auto& fn : fns) {
    total += radius_pairs(fn.family(), grid).size() * grid.m_values.size();
  }
  return total;
}

CandidateStream::CandidateStream(std::span<const DomainEvalFn> fns,
                                 GridSpec grid)
    : grid_(std::move(grid)) {
  fns_.reserve(fns.size());
  for (const auto& fn : fns) fns_.push_back(&fn);
  std::sort(fns_.begin(), fns_.end(),
            [](const DomainEvalFn* a, const DomainEvalFn* b) {
              return a->id() < b->id();
            });
  load_pairs();
}

void CandidateStream::load_pairs() {
  pairs_.clear();
  pair_pos_ = 0;
  m_pos_ = 0;
  while (fn_pos_ < fns_.size()) {
    pairs_ = radius_pairs(fns_[fn_pos_]->family(), grid_);
    if (!pairs_.empty() && !grid_.m_values.empty()) return;
    ++fn_pos_;
  }
}

std::optional<Sdc> CandidateStream::next() {
  if (fn_pos_ >= fns_.size()) return std::nullopt;
  const DomainEvalFn& fn = *fns_[fn_pos_];
  const auto [d_in, d_out] = pairs_[pair_pos_];
  const double m = grid_.m_values[m_pos_];
  Sdc sdc{make_sdc_id(fn.id(), d_in, d_out, m), fn.id(), d_in, d_out, m, 0.0};

  if (++m_pos_ == grid_.m_values.size()) {
    m_pos_ = 0;
    if (++pair_pos_ == pairs_.size()) {
      ++fn_pos_;
      load_pairs();
    }
  }
  return sdc;
}

}  // namespace autotest
