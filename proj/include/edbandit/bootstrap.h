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

#ifndef EDBANDIT_BOOTSTRAP_H_
#define EDBANDIT_BOOTSTRAP_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "edbandit/instance.h"
#include "json.hpp"

namespace edbandit {

// Accuracy xi solving (xi / p_v) (1/(p_v - xi) + 1/(p_v + xi)) = gamma p_v / 2,
// i.e. the positive root of gamma p_v xi^2 + 4 xi - gamma p_v^3 = 0.
double xi_target(double p_v, double gamma);

// Two closed-form approximations of the root, kept for comparison:
//   2 (sqrt(1 + p_v^4 gamma^2) - 1) / (p_v gamma)
//   2 (sqrt(1 - p_v^4 gamma^2) - 1) / (p_v gamma)   (negative for all valid inputs)
double xi_closed_form_plus(double p_v, double gamma);
double xi_closed_form_minus(double p_v, double gamma);

// ceil(2 |V| log(2T) / xi^2). Throws std::invalid_argument for xi <= 0.
std::uint64_t n_samples(int num_actions, std::int64_t horizon, double xi);

// ceil(2n / p_x + log(|X| N T sqrt(E)) / (2 p_x^2)).
std::uint64_t a_samples(std::uint64_t n, double p_x, int num_contexts,
                        int num_experts, std::int64_t horizon,
                        int num_episodes);

// Confidence achieved by n draws at accuracy xi over S outcomes,
// 2 exp(-n xi^2 / (2 S)); the inverse of the multinomial deviation bound
// sqrt(2 S log(2 / delta) / n).
double achieved_delta(std::uint64_t n, double xi, int num_actions);

// Deviation radius sqrt(2 S log(2 / delta) / n).
double multinomial_radius(int support, double delta, std::uint64_t n);

struct BootstrapOverride {
  double xi = 0.0;
  std::uint64_t n = 0;
  std::uint64_t a = 0;
};

struct BootstrapPlan {
  double xi = 0.0;
  std::uint64_t n = 0;
  std::uint64_t a = 0;
  double delta_effective = 0.0;
  std::optional<BootstrapOverride> practical_override;

  // Values actually used for sampling and for the agent's ratio offsets.
  double used_xi() const {
    return practical_override ? practical_override->xi : xi;
  }
  std::uint64_t used_n() const {
    return practical_override ? practical_override->n : n;
  }
  std::uint64_t used_a() const {
    return practical_override ? practical_override->a : a;
  }

  nlohmann::json to_json() const;
};

// Theory-prescribed plan from the instance parameters and dimensions.
BootstrapPlan make_plan(const InstanceParams& params, const ProblemDims& dims);

// Offline draw counts, [expert][context][action].
struct SampleCounts {
  int num_experts = 0;
  int num_contexts = 0;
  int num_actions = 0;
  std::vector<std::uint64_t> counts;
  bool complete = false;

  std::uint64_t& at(int i, int x, int v) {
    return counts[(static_cast<std::size_t>(i) * num_contexts + x) *
                      num_actions +
                  v];
  }
  std::uint64_t at(int i, int x, int v) const {
    return counts[(static_cast<std::size_t>(i) * num_contexts + x) *
                      num_actions +
                  v];
  }
  std::uint64_t row_total(int i, int x) const;
  std::uint64_t min_row_total() const;
};

// Plays each expert `a` times with contexts drawn from `prior`. Each expert
// uses its own stream derived from (seed, expert), so experts are sampled in
// parallel without changing the result. `complete` reports whether every
// (expert, context) row reached `n`. Throws AssumptionViolation if the prior
// puts less than p_x on some context.
SampleCounts sample_offline(const PolicyTable& true_policies,
                            std::span<const double> prior, double p_x,
                            std::uint64_t n, std::uint64_t a,
                            std::uint64_t seed);

struct ApproxPolicies {
  PolicyTable policies;
  bool complete = false;        // every row reached n
  bool fallback_used = false;   // some row was empty or had an empty cell
  // (xi, delta) certificate, present only when complete.
  std::optional<std::pair<double, double>> certificate;
};

// Empirical frequencies counts / row total. An empty row becomes uniform; a
// row with an unobserved action gets add-one smoothing so that every ratio
// stays finite. Both cases set fallback_used.
ApproxPolicies build_approx_policies(const SampleCounts& counts, double xi,
                                     double delta, std::uint64_t n);

}  // namespace edbandit

#endif  // EDBANDIT_BOOTSTRAP_H_
