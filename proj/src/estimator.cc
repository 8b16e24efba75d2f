// Copyright 2026 The edbandit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edbandit/estimator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace edbandit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::shared_ptr<const EstimatorTables> make_estimator_tables(
    const RatioTables& ratios, const DivergenceTable& divergence) {
  auto t = std::make_shared<EstimatorTables>();
  const int n = ratios.num_experts();
  if (divergence.num_experts() != n) {
    throw std::invalid_argument("estimator tables: expert counts disagree");
  }
  t->num_experts = n;
  t->num_contexts = ratios.num_contexts();
  t->num_actions = ratios.num_actions();
  t->kappa = ratios.kappa();
  t->errors.kappa = ratios.kappa();
  const std::size_t cells =
      static_cast<std::size_t>(n) * t->num_contexts * t->num_actions;
  t->layouts.resize(n);
  t->errors.entries.resize(n);
  t->errors.suffix_max_hi.resize(n);
  t->errors.prefix_max_width.resize(n);

  for (int i = 0; i < n; ++i) {
    ClipLayout& lay = t->layouts[i];
    lay.bucket_of.assign(cells, 0);
    lay.weight.assign(cells, 0.0);
    lay.inv_m.assign(n, 0.0);
    std::vector<double> cell_key(cells);
    auto& entries = t->errors.entries[i];
    entries.reserve(cells);
    for (int j = 0; j < n; ++j) {
      const double m = divergence(i, j);
      lay.inv_m[j] = 1.0 / m;
      for (int x = 0; x < t->num_contexts; ++x) {
        for (int v = 0; v < t->num_actions; ++v) {
          const std::size_t c = t->cell(j, x, v);
          const double hi = ratios.hi(i, j, x, v);
          const double lo = ratios.lo(i, j, x, v);
          cell_key[c] = hi / m;
          lay.weight[c] = lo / m;
          entries.push_back({cell_key[c], hi, hi - lo});
        }
      }
    }
    lay.keys = cell_key;
    std::sort(lay.keys.begin(), lay.keys.end());
    lay.keys.erase(std::unique(lay.keys.begin(), lay.keys.end()),
                   lay.keys.end());
    for (std::size_t c = 0; c < cells; ++c) {
      lay.bucket_of[c] = static_cast<int>(
          std::lower_bound(lay.keys.begin(), lay.keys.end(), cell_key[c]) -
          lay.keys.begin());
    }

    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.key < b.key; });
    const std::size_t m = entries.size();
    auto& suffix = t->errors.suffix_max_hi[i];
    auto& prefix = t->errors.prefix_max_width[i];
    suffix.assign(m + 1, -kInf);
    prefix.assign(m + 1, -kInf);
    for (std::size_t p = m; p-- > 0;) {
      suffix[p] = std::max(suffix[p + 1], entries[p].r_hi);
    }
    for (std::size_t p = 0; p < m; ++p) {
      prefix[p + 1] = std::max(prefix[p], entries[p].width);
    }
  }
  return t;
}

double clip_threshold(double epsilon) {
  return epsilon > 0.0 ? 2.0 * std::log(2.0 / epsilon) : kInf;
}

double error_term(const ErrorTermTables& tables, int expert, double epsilon) {
  const auto& entries = tables.entries[expert];
  const double theta = clip_threshold(epsilon);
  const auto split = static_cast<std::size_t>(
      std::upper_bound(entries.begin(), entries.end(), theta,
                       [](double th, const auto& e) { return th < e.key; }) -
      entries.begin());
  const double kept = tables.prefix_max_width[expert][split];
  const double dropped = tables.suffix_max_hi[expert][split];
  return std::max(kept, dropped);
}

ClippedIsState::ClippedIsState(std::shared_ptr<const EstimatorTables> tables,
                               double c)
    : tables_(std::move(tables)), c_(c) {
  if (!tables_) throw std::invalid_argument("ClippedIsState: null tables");
  reset();
}

void ClippedIsState::reset() {
  t_ = 0;
  z_.assign(tables_->num_experts, 0.0);
  sums_.resize(tables_->num_experts);
  for (int i = 0; i < tables_->num_experts; ++i) {
    sums_[i].assign(tables_->layouts[i].keys.size(), 0.0);
  }
}

void ClippedIsState::record_sample(int played, int context, int action,
                                   double reward) {
  const std::size_t c = tables_->cell(played, context, action);
  for (int i = 0; i < tables_->num_experts; ++i) {
    const ClipLayout& lay = tables_->layouts[i];
    z_[i] += lay.inv_m[played];
    sums_[i][lay.bucket_of[c]] += reward * lay.weight[c];
  }
  ++t_;
}

double ClippedIsState::clip_level(int expert) const {
  if (t_ < 1) return 0.0;
  const double t = static_cast<double>(t_);
  const double tlogt = t * std::log(t);
  if (!(tlogt > 0.0)) return 0.0;
  return c_ * w_inverse(std::sqrt(tlogt) / z_[expert]);
}

double ClippedIsState::estimate(int expert) const {
  return estimate(expert, clip_level(expert));
}

double ClippedIsState::estimate(int expert, double epsilon) const {
  if (t_ < 1) return 0.0;
  const auto& keys = tables_->layouts[expert].keys;
  const auto& sums = sums_[expert];
  const double theta = clip_threshold(epsilon);
  double total = 0.0;
  for (std::size_t b = 0; b < keys.size() && keys[b] <= theta; ++b) {
    total += sums[b];
  }
  return total / z_[expert];
}

double ClippedIsState::error_term(int expert) const {
  return edbandit::error_term(tables_->errors, expert, clip_level(expert));
}

double ClippedIsState::ucb_index(int expert, bool with_error_term) const {
  if (t_ < 1) return kInf;
  const double eps = clip_level(expert);
  double u = estimate(expert, eps) + 1.5 * eps;
  if (with_error_term) u += edbandit::error_term(tables_->errors, expert, eps);
  return u;
}

double default_clip_constant(double m_global, double gamma, double p_v) {
  return 32.0 * m_global / (gamma * (1.0 - p_v));
}

}  // namespace edbandit
