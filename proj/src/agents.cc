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

#include "edbandit/agents.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "edbandit/errors.h"

namespace edbandit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kEdUcb:
      return "ed_ucb";
    case AgentKind::kDUcb:
      return "d_ucb";
    case AgentKind::kUcb1:
      return "ucb1";
    case AgentKind::kKlUcb:
      return "kl_ucb";
  }
  return "unknown";
}

AgentKind agent_kind_from_string(const std::string& name) {
  if (name == "ed_ucb") return AgentKind::kEdUcb;
  if (name == "d_ucb") return AgentKind::kDUcb;
  if (name == "ucb1") return AgentKind::kUcb1;
  if (name == "kl_ucb") return AgentKind::kKlUcb;
  throw ConfigError("unknown agent kind '" + name + "'");
}

ExplorationFn exploration_fn_from_string(const std::string& name) {
  if (name == "log_t") return ExplorationFn::kLogT;
  if (name == "log_t_plus_3loglog_t") return ExplorationFn::kLogTPlus3LogLogT;
  throw ConfigError("unknown exploration function '" + name + "'");
}

int argmax_index(std::span<const double> indices) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(indices.size()); ++i) {
    // Strict comparison keeps the lowest index on ties, including +inf ties.
    if (indices[i] > indices[best]) best = i;
  }
  return best;
}

// -- ClippedIsAgent ----------------------------------------------------------

ClippedIsAgent::ClippedIsAgent(std::shared_ptr<const EstimatorTables> tables,
                               double c, bool with_error_term)
    : state_(std::move(tables), c), with_error_term_(with_error_term) {}

double ClippedIsAgent::index(int expert) const {
  return state_.ucb_index(expert, with_error_term_);
}

int ClippedIsAgent::select_expert() const {
  std::vector<double> u(num_experts());
  for (int i = 0; i < num_experts(); ++i) u[i] = index(i);
  return argmax_index(u);
}

void ClippedIsAgent::observe(int expert, int context, int action,
                             double reward) {
  state_.record_sample(expert, context, action, reward);
}

std::vector<ExpertDiagnostics> ClippedIsAgent::diagnostics() const {
  std::vector<ExpertDiagnostics> out(num_experts());
  for (int i = 0; i < num_experts(); ++i) {
    auto& d = out[i];
    d.z = state_.z(i);
    d.epsilon = state_.clip_level(i);
    d.error = with_error_term_
                  ? error_term(state_.tables().errors, i, d.epsilon)
                  : 0.0;
    d.estimate = state_.estimate(i, d.epsilon);
    d.index = index(i);
  }
  return out;
}

// -- Counting agents ---------------------------------------------------------

CountingAgent::CountingAgent(int num_experts)
    : pulls_(num_experts, 0), sums_(num_experts, 0.0) {
  if (num_experts < 1) throw std::invalid_argument("need at least one expert");
}

int CountingAgent::select_expert() const {
  std::vector<double> u(num_experts());
  for (int i = 0; i < num_experts(); ++i) u[i] = index(i);
  return argmax_index(u);
}

void CountingAgent::observe(int expert, int, int, double reward) {
  ++pulls_[expert];
  sums_[expert] += reward;
  ++t_;
}

void CountingAgent::reset() {
  std::fill(pulls_.begin(), pulls_.end(), 0);
  std::fill(sums_.begin(), sums_.end(), 0.0);
  t_ = 0;
}

std::vector<ExpertDiagnostics> CountingAgent::diagnostics() const {
  std::vector<ExpertDiagnostics> out(num_experts());
  for (int i = 0; i < num_experts(); ++i) {
    out[i].z = static_cast<double>(pulls_[i]);
    out[i].estimate = pulls_[i] > 0 ? sums_[i] / pulls_[i] : 0.0;
    out[i].index = index(i);
  }
  return out;
}

double Ucb1Agent::index(int expert) const {
  return ucb1_index(pulls_[expert], sums_[expert], t_);
}

double KlUcbAgent::index(int expert) const {
  return kl_ucb_index(pulls_[expert], sums_[expert], t_, exploration_);
}

double ucb1_index(std::int64_t pulls, double reward_sum, std::int64_t t) {
  if (pulls <= 0) return kInf;
  const double n = static_cast<double>(pulls);
  return reward_sum / n + std::sqrt(2.0 * std::log(static_cast<double>(t)) / n);
}

double bernoulli_kl(double p, double q) {
  auto term = [](double a, double b) {
    if (a <= 0.0) return 0.0;
    if (b <= 0.0) return kInf;
    return a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double exploration_level(std::int64_t t, ExplorationFn fn) {
  if (t < 1) return 0.0;
  const double log_t = std::log(static_cast<double>(t));
  if (fn == ExplorationFn::kLogTPlus3LogLogT && t >= 3) {
    return log_t + 3.0 * std::log(log_t);
  }
  return log_t;
}

double kl_ucb_bound(double mean, std::int64_t pulls, double level) {
  if (!(mean >= 0.0) || !(mean <= 1.0)) {
    throw std::invalid_argument("kl_ucb: empirical mean outside [0, 1]");
  }
  if (mean >= 1.0) return 1.0;
  if (!(level > 0.0)) return mean;
  const double n = static_cast<double>(pulls);
  double lo = mean;
  double hi = 1.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (n * bernoulli_kl(mean, mid) <= level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double kl_ucb_index(std::int64_t pulls, double reward_sum, std::int64_t t,
                    ExplorationFn fn) {
  if (pulls <= 0) return kInf;
  return kl_ucb_bound(reward_sum / static_cast<double>(pulls), pulls,
                      exploration_level(t, fn));
}

// -- Factory -----------------------------------------------------------------

IsAgentTables build_ed_ucb_tables(const PolicyTable& approx_policies,
                                  double xi, const InstanceParams& params,
                                  const ProblemDims& dims) {
  IsAgentTables t;
  t.ratios = ratio_tables(approx_policies, xi, params.p_v);
  t.divergence = divergence_lower(approx_policies, t.ratios, xi, params.p_x);
  t.divergence.set_m_global(divergence_upper(params, dims));
  t.estimator = make_estimator_tables(t.ratios, t.divergence);
  return t;
}

IsAgentTables build_d_ucb_tables(const PolicyTable& true_policies,
                                 std::span<const double> context_dist,
                                 const InstanceParams& params,
                                 const ProblemDims& dims) {
  IsAgentTables t;
  t.ratios = ratio_tables(true_policies, 0.0, params.p_v);
  t.divergence = divergence_exact(true_policies, context_dist);
  t.divergence.set_m_global(divergence_upper(params, dims));
  t.estimator = make_estimator_tables(t.ratios, t.divergence);
  return t;
}

double resolve_clip_constant(const AgentConfig& config,
                             const InstanceParams& params,
                             const ProblemDims& dims) {
  if (config.c_override) return *config.c_override;
  return default_clip_constant(divergence_upper(params, dims), params.gamma,
                               params.p_v);
}

std::unique_ptr<Agent> make_agent(const AgentConfig& config,
                                  const AgentKnowledge& knowledge,
                                  const IsAgentTables& tables) {
  const int n = knowledge.dims.num_experts;
  switch (config.kind) {
    case AgentKind::kUcb1:
      return std::make_unique<Ucb1Agent>(n);
    case AgentKind::kKlUcb:
      return std::make_unique<KlUcbAgent>(n, config.exploration);
    case AgentKind::kEdUcb:
    case AgentKind::kDUcb: {
      if (!tables.estimator || tables.estimator->num_experts != n) {
        throw ConfigError("agent tables do not match the problem");
      }
      const double c =
          resolve_clip_constant(config, knowledge.params, knowledge.dims);
      return std::make_unique<ClippedIsAgent>(
          tables.estimator, c, config.kind == AgentKind::kEdUcb);
    }
  }
  throw ConfigError("unknown agent kind");
}

std::unique_ptr<Agent> make_agent(const AgentConfig& config,
                                  const AgentKnowledge& knowledge) {
  IsAgentTables tables;
  if (config.kind == AgentKind::kEdUcb) {
    if (knowledge.approx_policies == nullptr) {
      throw ConfigError("ed_ucb needs approximate expert policies");
    }
    if (!config.xi) throw ConfigError("ed_ucb needs xi");
    if (!(*config.xi < knowledge.params.p_v)) {
      throw ConfigError("ed_ucb needs xi < p_v");
    }
    tables = build_ed_ucb_tables(*knowledge.approx_policies, *config.xi,
                                 knowledge.params, knowledge.dims);
  } else if (config.kind == AgentKind::kDUcb) {
    if (knowledge.true_policies == nullptr || knowledge.context_dist.empty()) {
      throw ConfigError(
          "d_ucb needs the true policies and the episode context distribution");
    }
    tables = build_d_ucb_tables(*knowledge.true_policies,
                                knowledge.context_dist, knowledge.params,
                                knowledge.dims);
  }
  return make_agent(config, knowledge, tables);
}

}  // namespace edbandit
