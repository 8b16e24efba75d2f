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

#ifndef EDBANDIT_ESTIMATOR_H_
#define EDBANDIT_ESTIMATOR_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "edbandit/divergence.h"

namespace edbandit {

// For one target expert i, every (played expert j, context, action) cell
// maps to a clipping key r_hi_ij(v|x) / M_ij. A sample is kept in the
// estimate of i while its key is at most 2 log(2 / eps_i). Keys are
// deduplicated and sorted so that the kept set is always a prefix.
struct ClipLayout {
  std::vector<double> keys;         // sorted ascending, unique
  std::vector<int> bucket_of;       // [j][x][v] -> position in keys
  std::vector<double> weight;       // [j][x][v] -> r_lo_ij(v|x) / M_ij
  std::vector<double> inv_m;        // [j] -> 1 / M_ij
};

// Per-target list of (key, r_hi, r_hi - r_lo) sorted by key, with running
// maxima so that the error term is a lookup at the split point.
struct ErrorTermTables {
  struct Entry {
    double key;
    double r_hi;
    double width;
  };
  std::vector<std::vector<Entry>> entries;          // [i], sorted by key
  std::vector<std::vector<double>> suffix_max_hi;   // [i][p] = max r_hi at >= p
  std::vector<std::vector<double>> prefix_max_width;  // [i][p] = max width at < p
  double kappa = 0.0;
};

// Read-only precomputation shared by every run that uses the same ratio and
// divergence tables.
struct EstimatorTables {
  int num_experts = 0;
  int num_contexts = 0;
  int num_actions = 0;
  std::vector<ClipLayout> layouts;  // [i]
  ErrorTermTables errors;
  double kappa = 0.0;

  std::size_t cell(int j, int x, int v) const {
    return (static_cast<std::size_t>(j) * num_contexts + x) * num_actions + v;
  }
};

std::shared_ptr<const EstimatorTables> make_estimator_tables(
    const RatioTables& ratios, const DivergenceTable& divergence);

// Clip threshold 2 log(2 / eps), +inf for eps <= 0.
double clip_threshold(double epsilon);

// e_i = max over (j, x, v) of r_hi - r_lo * 1{key <= threshold(eps)}.
double error_term(const ErrorTermTables& tables, int expert, double epsilon);

// Running state of the clipped importance-sampling estimates of every
// expert's mean, fed by the samples of whichever expert was played.
//
// The estimate of expert i after t samples is
//   (1 / Z_i) * sum_s y_s * r_lo_{i,k_s}(s) / M_{i,k_s} * 1{key_s <= theta_i(t)}
// with Z_i = sum_s 1 / M_{i,k_s}. Since the threshold theta_i(t) moves with t
// and is reapplied to every past sample, sums are kept per distinct key and
// the estimate is a prefix sum over keys.
class ClippedIsState {
 public:
  ClippedIsState(std::shared_ptr<const EstimatorTables> tables, double c);

  void record_sample(int played, int context, int action, double reward);

  std::int64_t steps() const { return t_; }
  int num_experts() const { return tables_->num_experts; }
  double clip_constant() const { return c_; }
  double z(int expert) const { return z_[expert]; }
  const std::vector<double>& bucket_sums(int expert) const {
    return sums_[expert];
  }
  const EstimatorTables& tables() const { return *tables_; }

  // eps_i(t) = C * w(sqrt(t log t) / Z_i(t)); 0 while t log t == 0.
  double clip_level(int expert) const;

  // The clipped estimate; 0 before any sample.
  double estimate(int expert) const;
  double estimate(int expert, double epsilon) const;

  double error_term(int expert) const;

  // U_i = estimate + 1.5 eps + e, or +inf before any sample. With
  // `with_error_term` false the e term is dropped.
  double ucb_index(int expert, bool with_error_term = true) const;

  void reset();

 private:
  std::shared_ptr<const EstimatorTables> tables_;
  double c_;
  std::int64_t t_ = 0;
  std::vector<double> z_;
  std::vector<std::vector<double>> sums_;
};

// Default clip constant 32 M / (gamma (1 - p_v)).
double default_clip_constant(double m_global, double gamma, double p_v);

}  // namespace edbandit

#endif  // EDBANDIT_ESTIMATOR_H_
