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

#include "edbandit/bootstrap.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "edbandit/errors.h"
#include "edbandit/rng.h"

namespace edbandit {

double xi_target(double p_v, double gamma) {
  if (!(p_v > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("xi_target: p_v and gamma must be positive");
  }
  // (sqrt(4 + a) - 2) / (gamma p_v) rewritten without cancellation.
  const double a = gamma * gamma * std::pow(p_v, 4);
  return gamma * std::pow(p_v, 3) / (std::sqrt(4.0 + a) + 2.0);
}

double xi_closed_form_plus(double p_v, double gamma) {
  return 2.0 * (std::sqrt(1.0 + std::pow(p_v, 4) * gamma * gamma) - 1.0) /
         (p_v * gamma);
}

double xi_closed_form_minus(double p_v, double gamma) {
  return 2.0 * (std::sqrt(1.0 - std::pow(p_v, 4) * gamma * gamma) - 1.0) /
         (p_v * gamma);
}

std::uint64_t n_samples(int num_actions, std::int64_t horizon, double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("n_samples: xi must be > 0");
  const double n = 2.0 * num_actions *
                   std::log(2.0 * static_cast<double>(horizon)) / (xi * xi);
  return static_cast<std::uint64_t>(std::ceil(n));
}

std::uint64_t a_samples(std::uint64_t n, double p_x, int num_contexts,
                        int num_experts, std::int64_t horizon,
                        int num_episodes) {
  const double a =
      2.0 * static_cast<double>(n) / p_x +
      std::log(static_cast<double>(num_contexts) * num_experts *
               static_cast<double>(horizon) *
               std::sqrt(static_cast<double>(num_episodes))) /
          (2.0 * p_x * p_x);
  return static_cast<std::uint64_t>(std::ceil(a));
}

double achieved_delta(std::uint64_t n, double xi, int num_actions) {
  return 2.0 * std::exp(-static_cast<double>(n) * xi * xi /
                        (2.0 * num_actions));
}

double multinomial_radius(int support, double delta, std::uint64_t n) {
  return std::sqrt(2.0 * support * std::log(2.0 / delta) /
                   static_cast<double>(n));
}

nlohmann::json BootstrapPlan::to_json() const {
  nlohmann::json j = {{"xi", xi},
                      {"n", n},
                      {"a", a},
                      {"delta_effective", delta_effective}};
  if (practical_override) {
    j["practical_override"] = {{"xi", practical_override->xi},
                               {"n", practical_override->n},
                               {"a", practical_override->a}};
  }
  return j;
}

BootstrapPlan make_plan(const InstanceParams& params, const ProblemDims& dims) {
  BootstrapPlan plan;
  plan.xi = xi_target(params.p_v, params.gamma);
  plan.n = n_samples(dims.num_actions, dims.horizon, plan.xi);
  plan.a = a_samples(plan.n, params.p_x, dims.num_contexts, dims.num_experts,
                     dims.horizon, dims.num_episodes);
  plan.delta_effective = achieved_delta(plan.n, plan.xi, dims.num_actions);
  return plan;
}

std::uint64_t SampleCounts::row_total(int i, int x) const {
  std::uint64_t s = 0;
  for (int v = 0; v < num_actions; ++v) s += at(i, x, v);
  return s;
}

std::uint64_t SampleCounts::min_row_total() const {
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  for (int i = 0; i < num_experts; ++i) {
    for (int x = 0; x < num_contexts; ++x) lo = std::min(lo, row_total(i, x));
  }
  return lo;
}

SampleCounts sample_offline(const PolicyTable& pol,
                            std::span<const double> prior, double p_x,
                            std::uint64_t n, std::uint64_t a,
                            std::uint64_t seed) {
  if (static_cast<int>(prior.size()) != pol.num_contexts()) {
    throw ConfigError("prior context distribution has the wrong length");
  }
  for (double p : prior) {
    if (!(p >= p_x) || !(p > 0.0)) {
      throw AssumptionViolation("prior context distribution puts less than p_x "
                                "on some context");
    }
  }
  SampleCounts out;
  out.num_experts = pol.num_experts();
  out.num_contexts = pol.num_contexts();
  out.num_actions = pol.num_actions();
  out.counts.assign(static_cast<std::size_t>(out.num_experts) *
                        out.num_contexts * out.num_actions,
                    0);
  const std::size_t width =
      static_cast<std::size_t>(out.num_contexts) * out.num_actions;

  auto sample_expert = [&](int i) {
    Rng rng = Rng::stream(
        {seed, static_cast<std::uint64_t>(StreamPurpose::kBootstrap),
         static_cast<std::uint64_t>(i)});
    std::uint64_t* row = out.counts.data() + i * width;
    for (std::uint64_t s = 0; s < a; ++s) {
      const int x = rng.categorical(prior);
      const int v = rng.categorical(pol.row(i, x));
      ++row[static_cast<std::size_t>(x) * out.num_actions + v];
    }
  };
  // Experts write disjoint slices of the count tensor.
  std::vector<std::future<void>> jobs;
  for (int i = 1; i < out.num_experts; ++i) {
    jobs.push_back(std::async(std::launch::async, sample_expert, i));
  }
  sample_expert(0);
  for (auto& j : jobs) j.get();

  out.complete = out.min_row_total() >= n;
  return out;
}

ApproxPolicies build_approx_policies(const SampleCounts& counts, double xi,
                                     double delta, std::uint64_t n) {
  ApproxPolicies out;
  out.policies = PolicyTable(counts.num_experts, counts.num_contexts,
                             counts.num_actions);
  out.complete = counts.min_row_total() >= n;
  for (int i = 0; i < counts.num_experts; ++i) {
    for (int x = 0; x < counts.num_contexts; ++x) {
      auto row = out.policies.row(i, x);
      const std::uint64_t total = counts.row_total(i, x);
      if (total == 0) {
        std::fill(row.begin(), row.end(), 1.0 / counts.num_actions);
        out.fallback_used = true;
        continue;
      }
      bool has_zero = false;
      for (int v = 0; v < counts.num_actions; ++v) {
        has_zero = has_zero || counts.at(i, x, v) == 0;
      }
      const double extra = has_zero ? 1.0 : 0.0;
      const double denom =
          static_cast<double>(total) + extra * counts.num_actions;
      for (int v = 0; v < counts.num_actions; ++v) {
        row[v] = (static_cast<double>(counts.at(i, x, v)) + extra) / denom;
      }
      out.fallback_used = out.fallback_used || has_zero;
    }
  }
  if (out.complete) out.certificate = std::make_pair(xi, delta);
  return out;
}

}  // namespace edbandit
