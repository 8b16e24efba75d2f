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

#ifndef EDBANDIT_AGENTS_H_
#define EDBANDIT_AGENTS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edbandit/divergence.h"
#include "edbandit/estimator.h"
#include "edbandit/instance.h"

namespace edbandit {

enum class AgentKind { kEdUcb, kDUcb, kUcb1, kKlUcb };

enum class ExplorationFn { kLogT, kLogTPlus3LogLogT };

std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& name);
ExplorationFn exploration_fn_from_string(const std::string& name);

struct AgentConfig {
  AgentKind kind = AgentKind::kUcb1;
  // Clip constant C for the importance-sampling agents. When absent the
  // analysis default 32 M / (gamma (1 - p_v)) is used.
  std::optional<double> c_override;
  // Approximation quality of the expert estimates (ED-UCB only). When absent
  // the bootstrap plan decides.
  std::optional<double> xi;
  std::optional<double> delta;
  ExplorationFn exploration = ExplorationFn::kLogTPlus3LogLogT;
  // Display name in traces; defaults to the kind.
  std::string label;

  std::string name() const { return label.empty() ? to_string(kind) : label; }
};

// Per-expert view of an agent's internals at a point in time.
struct ExpertDiagnostics {
  double z = 0.0;         // normalizer (IS agents) or pull count
  double epsilon = 0.0;   // clip level; 0 for counting agents
  double error = 0.0;     // estimation error term; 0 for counting agents
  double estimate = 0.0;  // mean estimate
  double index = 0.0;     // selection index
};

class Agent {
 public:
  virtual ~Agent() = default;

  // Expert to play next: the largest index, lowest expert on ties, and
  // experts with an infinite index first.
  virtual int select_expert() const = 0;
  virtual void observe(int expert, int context, int action, double reward) = 0;
  virtual double index(int expert) const = 0;
  virtual int num_experts() const = 0;
  // Samples seen since construction or the last reset.
  virtual std::int64_t steps() const = 0;
  virtual void reset() = 0;
  virtual std::vector<ExpertDiagnostics> diagnostics() const = 0;
};

// Argmax with the tie rule above.
int argmax_index(std::span<const double> indices);

// Shared-sample agent driven by clipped importance sampling. ED-UCB uses
// estimated ratio/divergence tables and the e_i term; D-UCB uses exact tables
// with xi = 0 and no e_i term.
class ClippedIsAgent final : public Agent {
 public:
  ClippedIsAgent(std::shared_ptr<const EstimatorTables> tables, double c,
                 bool with_error_term);

  int select_expert() const override;
  void observe(int expert, int context, int action, double reward) override;
  double index(int expert) const override;
  int num_experts() const override { return state_.num_experts(); }
  std::int64_t steps() const override { return state_.steps(); }
  void reset() override { state_.reset(); }
  std::vector<ExpertDiagnostics> diagnostics() const override;

  const ClippedIsState& state() const { return state_; }

 private:
  ClippedIsState state_;
  bool with_error_term_;
};

// Treats experts as independent arms; only the played arm learns.
class CountingAgent : public Agent {
 public:
  explicit CountingAgent(int num_experts);

  int select_expert() const override;
  void observe(int expert, int context, int action, double reward) override;
  int num_experts() const override { return static_cast<int>(pulls_.size()); }
  std::int64_t steps() const override { return t_; }
  void reset() override;
  std::vector<ExpertDiagnostics> diagnostics() const override;

  std::int64_t pulls(int expert) const { return pulls_[expert]; }
  double reward_sum(int expert) const { return sums_[expert]; }

 protected:
  std::vector<std::int64_t> pulls_;
  std::vector<double> sums_;
  std::int64_t t_ = 0;
};

class Ucb1Agent final : public CountingAgent {
 public:
  using CountingAgent::CountingAgent;
  double index(int expert) const override;
};

class KlUcbAgent final : public CountingAgent {
 public:
  KlUcbAgent(int num_experts, ExplorationFn exploration)
      : CountingAgent(num_experts), exploration_(exploration) {}
  double index(int expert) const override;

 private:
  ExplorationFn exploration_;
};

// mean + sqrt(2 log t / n); +inf when n == 0.
double ucb1_index(std::int64_t pulls, double reward_sum, std::int64_t t);

// Bernoulli relative entropy kl(p, q) with 0 log 0 = 0.
double bernoulli_kl(double p, double q);

// Exploration level log t, or log t + 3 log log t (the latter only where
// log log t is defined and positive, i.e. t >= 3; log t below that).
double exploration_level(std::int64_t t, ExplorationFn fn);

// Largest q in [mean, 1] with n kl(mean, q) <= level, by bisection to 1e-9.
// +inf when n == 0.
double kl_ucb_index(std::int64_t pulls, double reward_sum, std::int64_t t,
                    ExplorationFn fn);
double kl_ucb_bound(double mean, std::int64_t pulls, double level);

// What an agent factory may know about the problem.
struct AgentKnowledge {
  InstanceParams params;
  ProblemDims dims;
  // Estimated policies for ED-UCB.
  const PolicyTable* approx_policies = nullptr;
  // True policies and this episode's context distribution for D-UCB.
  const PolicyTable* true_policies = nullptr;
  std::span<const double> context_dist;
};

// Precomputed tables for ED-UCB: ratios from the approximate policies with
// the given xi and divergence lower estimates with p_x. Independent of the
// episode.
struct IsAgentTables {
  RatioTables ratios;
  DivergenceTable divergence;
  std::shared_ptr<const EstimatorTables> estimator;
};
IsAgentTables build_ed_ucb_tables(const PolicyTable& approx_policies,
                                  double xi, const InstanceParams& params,
                                  const ProblemDims& dims);

// Exact tables for D-UCB under one episode's context distribution.
IsAgentTables build_d_ucb_tables(const PolicyTable& true_policies,
                                 std::span<const double> context_dist,
                                 const InstanceParams& params,
                                 const ProblemDims& dims);

// Clip constant for `config`, falling back to the analysis default.
double resolve_clip_constant(const AgentConfig& config,
                             const InstanceParams& params,
                             const ProblemDims& dims);

// Builds a cold agent. ED-UCB needs approx_policies and config.xi; D-UCB needs
// true_policies and context_dist. Throws ConfigError when knowledge is
// missing.
std::unique_ptr<Agent> make_agent(const AgentConfig& config,
                                  const AgentKnowledge& knowledge);

// Same, reusing precomputed tables for the importance-sampling kinds.
std::unique_ptr<Agent> make_agent(const AgentConfig& config,
                                  const AgentKnowledge& knowledge,
                                  const IsAgentTables& tables);

}  // namespace edbandit

#endif  // EDBANDIT_AGENTS_H_
