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

#include <algorithm>
#include <cmath>

#include "edbandit/divergence.h"
#include "edbandit/estimator.h"
#include "edbandit/harness.h"

namespace edbandit {

using nlohmann::json;

std::optional<double> first_time_from(
    const std::function<bool(double)>& holds) {
  constexpr std::uint64_t kStart = 3;
  constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
  auto at = [&](std::uint64_t t) { return holds(static_cast<double>(t)); };
  if (at(kStart)) {
    std::uint64_t t = kStart;
    while (t > 1 && at(t - 1)) --t;
    return static_cast<double>(t);
  }
  std::uint64_t lo = kStart;  // fails
  std::uint64_t hi = 2 * kStart;
  while (!at(hi)) {
    lo = hi;
    if (hi >= kCap) return std::nullopt;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return static_cast<double>(hi);
}

std::optional<double> tau_best(double c, double gamma) {
  return first_time_from([=](double t) {
    return c * w_inverse(std::sqrt(std::log(t) / t)) <= gamma;
  });
}

std::optional<double> tau_suboptimal(double c, double m, double effective_gap) {
  if (!(effective_gap > 0.0)) return std::nullopt;
  const double l = std::log(6.0 * c / effective_gap);
  const double bound =
      9.0 * c * c * m * m * l * l / (effective_gap * effective_gap);
  return first_time_from([=](double t) {
    // t / log t is +inf at t = 1.
    return t / std::log(t) >= bound;
  });
}

std::optional<double> t_clip_time(double c, double m, double max_key) {
  return first_time_from([=](double t) {
    const double eps = c * w_inverse(m * std::sqrt(std::log(t) / t));
    return max_key <= clip_threshold(eps);
  });
}

AnalysisTimes analysis_times(const Instance& instance, int episode, double c,
                             double m, GapVariant variant, double xi) {
  const auto& ep = instance.episodes.at(episode);
  const auto means = expert_means(instance.policies, ep);
  AnalysisTimes out;
  out.episode = episode;
  out.variant = variant;
  out.best_expert = static_cast<int>(
      std::max_element(means.begin(), means.end()) - means.begin());

  const IsAgentTables tables =
      variant == GapVariant::kEdUcb
          ? build_ed_ucb_tables(instance.policies, xi, instance.params,
                                instance.dims)
          : build_d_ucb_tables(instance.policies, ep.context_dist,
                               instance.params, instance.dims);
  double max_key = 0.0;
  for (const auto& lay : tables.estimator->layouts) {
    max_key = std::max(max_key, lay.keys.back());
  }
  out.t_clip = t_clip_time(c, m, max_key);
  out.tau_1 = tau_best(c, instance.params.gamma);
  if (out.t_clip && out.tau_1) out.t_1 = std::max(*out.t_clip, *out.tau_1);

  const double shrink = instance.params.gamma * instance.params.p_v;
  for (int k = 0; k < static_cast<int>(means.size()); ++k) {
    if (k == out.best_expert) continue;
    ExpertTimes et;
    et.expert = k;
    et.gap = means[out.best_expert] - means[k];
    const bool ed = variant == GapVariant::kEdUcb;
    const double effective = ed ? et.gap - shrink : et.gap;
    et.defined = effective > 0.0;
    if (et.defined) {
      et.tau = tau_suboptimal(c, ed ? m : 1.0, effective);
      if (et.tau && out.t_1) et.t_k = std::max(*out.t_1, *et.tau);
    }
    out.suboptimal.push_back(et);
  }
  return out;
}

json AnalysisTimes::to_json() const {
  auto opt = [](const std::optional<double>& v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  json subs = json::array();
  for (const auto& s : suboptimal) {
    subs.push_back({{"expert", s.expert},
                    {"gap", s.gap},
                    {"defined", s.defined},
                    {"tau_k", opt(s.tau)},
                    {"t_k", opt(s.t_k)}});
  }
  return {{"episode", episode},
          {"variant", variant == GapVariant::kEdUcb ? "ed_ucb_gaps"
                                                    : "d_ucb_gaps"},
          {"best_expert", best_expert},
          {"t_clip", opt(t_clip)},
          {"tau_1", opt(tau_1)},
          {"t_1", opt(t_1)},
          {"suboptimal", subs}};
}

}  // namespace edbandit
