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

#ifndef EDBANDIT_DIVERGENCE_H_
#define EDBANDIT_DIVERGENCE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "edbandit/instance.h"
#include "json.hpp"

namespace edbandit {

// f1(x) = x * exp(x - 1) - 1, the generator of the divergence used to size
// the clipping thresholds.
double f1(double x);

// Importance ratios pi_i(v|x) / pi_j(v|x) between every pair of experts,
// with a lower and upper confidence value of constant offset. Indexed
// [i][j][x][v].
class RatioTables {
 public:
  RatioTables() = default;
  RatioTables(int num_experts, int num_contexts, int num_actions);

  int num_experts() const { return num_experts_; }
  int num_contexts() const { return num_contexts_; }
  int num_actions() const { return num_actions_; }

  double hat(int i, int j, int x, int v) const { return hat_[index(i, j, x, v)]; }
  double lo(int i, int j, int x, int v) const { return lo_[index(i, j, x, v)]; }
  double hi(int i, int j, int x, int v) const { return hi_[index(i, j, x, v)]; }

  // r_hi - r_lo, the same for every entry.
  double kappa() const { return kappa_; }

 private:
  friend RatioTables ratio_tables(const PolicyTable&, double, double);

  std::size_t index(int i, int j, int x, int v) const {
    return ((static_cast<std::size_t>(i) * num_experts_ + j) * num_contexts_ +
            x) *
               num_actions_ +
           v;
  }

  int num_experts_ = 0;
  int num_contexts_ = 0;
  int num_actions_ = 0;
  double kappa_ = 0.0;
  std::vector<double> hat_, lo_, hi_;
};

// r_lo = r_hat - xi / (p_v (p_v - xi)), r_hi = r_hat + xi / (p_v (p_v + xi)).
// Requires 0 <= xi < p_v and strictly positive policy entries; throws
// std::invalid_argument otherwise. r_lo is not floored at zero.
RatioTables ratio_tables(const PolicyTable& policies, double xi, double p_v);

// Offset width xi / (p_v (p_v - xi)) + xi / (p_v (p_v + xi)).
double ratio_sandwich_width(double xi, double p_v);

enum class DivergenceMode { kEstimated, kExact };

// Pairwise constants M_ij = 1 + log(1 + D(i||j)), all >= 1.
class DivergenceTable {
 public:
  DivergenceTable() = default;
  DivergenceTable(int num_experts, DivergenceMode mode);

  int num_experts() const { return num_experts_; }
  DivergenceMode mode() const { return mode_; }

  double operator()(int i, int j) const { return m_[index(i, j)]; }
  double& operator()(int i, int j) { return m_[index(i, j)]; }

  // The divergence value D(i||j) the constant was built from (after the
  // floor at zero in estimated mode).
  double divergence(int i, int j) const { return d_[index(i, j)]; }

  // Global bound M. Defaults to the largest entry; callers holding the
  // instance parameters replace it with divergence_upper.
  double m_global() const { return m_global_; }
  void set_m_global(double m) { m_global_ = m; }

  double max_entry() const;

  nlohmann::json to_json() const;

 private:
  friend DivergenceTable divergence_lower(const PolicyTable&,
                                          const RatioTables&, double, double);
  friend DivergenceTable divergence_exact(const PolicyTable&,
                                          std::span<const double>);

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * num_experts_ + j;
  }

  int num_experts_ = 0;
  DivergenceMode mode_ = DivergenceMode::kEstimated;
  double m_global_ = 1.0;
  std::vector<double> m_;
  std::vector<double> d_;
};

// Lower estimate of the pairwise divergence from approximate policies:
//   D_lo(i||j) = p_x * sum_x sum_v (pihat_i(v|x) - xi) * f1(r_lo_ij(v|x)),
// floored at 0, and M_lo_ij = 1 + log(1 + D_lo(i||j)).
DivergenceTable divergence_lower(const PolicyTable& approx_policies,
                                 const RatioTables& ratios, double xi,
                                 double p_x);

// Exact divergence under known policies and a known context distribution:
//   D(i||j) = sum_x p(x) sum_v pi_i(v|x) f1(pi_i(v|x) / pi_j(v|x)).
DivergenceTable divergence_exact(const PolicyTable& true_policies,
                                 std::span<const double> context_dist);

// Instance-independent bound M >= max_ij M_ij for every instance satisfying
// the p_x and p_v floors:
//   max(1 + log(1 + f1(r_max)), (1 - p_x) |X| |V| f1(r_max)),
// with r_max = (1 - p_v) / p_v the largest possible ratio.
double divergence_upper(const InstanceParams& params, const ProblemDims& dims);

// Inverse of g(y) = y / log(2 / y) on (0, 2). Returns 0 for x <= 0 and
// saturates just below 2 for very large x.
double w_inverse(double x);

// g itself, evaluated accurately near y = 2.
double w_forward(double y);

}  // namespace edbandit

#endif  // EDBANDIT_DIVERGENCE_H_
