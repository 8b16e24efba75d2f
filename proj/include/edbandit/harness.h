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

#ifndef EDBANDIT_HARNESS_H_
#define EDBANDIT_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edbandit/agents.h"
#include "edbandit/bootstrap.h"
#include "edbandit/instance.h"
#include "json.hpp"

namespace edbandit {

// -- Configuration -----------------------------------------------------------

struct GeneratorSpec {
  ProblemDims dims;
  InstanceParams params;
  std::uint64_t seed = 0;
  // When positive, seeds seed, seed + 1, ... are tried until every episode
  // separates its best and second-best expert by at least min_gap.
  double min_gap = 0.0;
  int max_tries = 1000000;
};

enum class BootstrapMode {
  kOffline,  // sample before play, no regret charged
  kOnline,   // sample at the head of the timeline, charge A N mu*_1
  kExact,    // hand the true policies to ED-UCB (no sampling)
};

struct BootstrapSettings {
  BootstrapMode mode = BootstrapMode::kOffline;
  std::optional<BootstrapOverride> practical_override;
  // Context distribution of the sampling oracle; episode 0's when empty.
  std::vector<double> prior;
};

struct ExperimentConfig {
  std::optional<std::filesystem::path> instance_file;
  std::optional<GeneratorSpec> generator;
  std::vector<AgentConfig> agents;
  // Overrides for the instance's episode count and horizon.
  std::optional<int> episodes;
  std::optional<std::int64_t> horizon;
  int num_runs = 1;
  std::uint64_t base_seed = 0;
  std::int64_t checkpoint_every = 100;
  BootstrapSettings bootstrap;
  // Worker threads for replications; 0 means hardware concurrency.
  int threads = 0;
  bool diagnostics = false;
  std::optional<std::filesystem::path> trace_path;
  std::optional<std::filesystem::path> summary_path;
  std::optional<std::filesystem::path> diagnostics_path;
};

// Parses the JSON config document. Relative paths are resolved against
// `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Loads or generates the instance and applies the episode/horizon overrides.
Instance resolve_instance(const ExperimentConfig& config);

// Smallest gap between best and second-best expert over all episodes
// (+inf with one expert).
double min_episode_gap(const Instance& instance);

// Generator with the min_gap retry loop. Returns the instance; `used_seed`
// receives the seed that produced it.
Instance generate_with_gap(const GeneratorSpec& spec,
                           std::uint64_t* used_seed = nullptr);

// -- Traces ------------------------------------------------------------------

struct TraceRecord {
  std::string algorithm;
  int run = 0;
  int episode = 0;
  std::int64_t step = 0;  // global step within the run, 1-based
  double cum_regret = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct DiagnosticRecord {
  std::string algorithm;
  int run = 0;
  int episode = 0;
  std::int64_t step = 0;
  std::int64_t agent_steps = 0;
  int expert = 0;
  ExpertDiagnostics values;
};

struct RegretTrace {
  std::vector<std::string> algorithms;
  int num_runs = 0;
  int num_episodes = 0;
  std::int64_t horizon = 0;
  std::int64_t checkpoint_every = 0;
  std::vector<std::vector<double>> expert_means;  // [episode][expert]
  std::vector<double> best_means;                 // [episode]
  // Regret charged before the first step, per algorithm (online bootstrap).
  std::vector<double> initial_regret;
  std::vector<TraceRecord> records;  // ordered by run, algorithm, step
  std::vector<DiagnosticRecord> diagnostics;
};

// -- Running -----------------------------------------------------------------

// Per-step callback: within-episode step (1-based), expert played, sample.
using StepObserver = std::function<void(std::int64_t, int, const Step&)>;

// Plays one episode of `horizon` steps from the agent's current state.
void play_episode(Agent& agent, const Instance& instance, int episode,
                  std::int64_t horizon, Rng& rng,
                  const StepObserver& observer = {});

// Everything one run needs that does not depend on the run's randomness.
struct SharedTables {
  BootstrapPlan plan;
  // D-UCB tables per episode (exact divergences under p_e).
  std::vector<IsAgentTables> d_ucb;
  // ED-UCB tables per agent when the bootstrap mode is kExact.
  std::vector<std::optional<IsAgentTables>> ed_ucb_exact;
};

SharedTables prepare_shared(const ExperimentConfig& config,
                            const Instance& instance);

// Cost charged up front for online bootstrapping: A * N * mu*_1.
double online_bootstrap_regret(const BootstrapPlan& plan,
                               const Instance& instance);

// One independent run: bootstrap (once), then for every episode a fresh agent
// per config and `horizon` steps. Streams are derived from
// (base_seed, purpose, run, agent) only.
RegretTrace run_single(const ExperimentConfig& config, const Instance& instance,
                       const SharedTables& shared, int run);

// Runs every replication, in parallel when config.threads != 1, and merges
// them in run order. The result does not depend on the thread count.
RegretTrace replicate(const ExperimentConfig& config, const Instance& instance);
RegretTrace replicate(const ExperimentConfig& config, const Instance& instance,
                      const SharedTables& shared);

struct ExperimentResult {
  RegretTrace trace;
  nlohmann::json summary;
};

// resolve_instance + validation + replicate + summary, writing outputs named
// in the config.
ExperimentResult run_experiment(const ExperimentConfig& config);

// -- Outputs -----------------------------------------------------------------

// CSV with header `algorithm,run,episode,step,cum_regret`.
void emit_trace(const RegretTrace& trace, const std::filesystem::path& path);
std::vector<TraceRecord> parse_trace(const std::filesystem::path& path);

void emit_diagnostics(const RegretTrace& trace,
                      const std::filesystem::path& path);

// Per algorithm: mean and standard deviation (n - 1 denominator, 0 for a
// single run) of cumulative regret at every episode boundary, at the final
// step, and of the regret accrued within each episode.
nlohmann::json summarize(const RegretTrace& trace);
void emit_summary(const RegretTrace& trace, const std::filesystem::path& path,
                  const nlohmann::json& extra = {});

// -- Analysis times ----------------------------------------------------------

enum class GapVariant { kEdUcb, kDUcb };

struct ExpertTimes {
  int expert = 0;
  double gap = 0.0;
  // Empty when the gap condition fails (gap <= gamma p_v for ED-UCB,
  // gap <= 0 for D-UCB) or the time exceeds the search range.
  std::optional<double> tau;
  std::optional<double> t_k;
  bool defined = false;
};

struct AnalysisTimes {
  int episode = 0;
  GapVariant variant = GapVariant::kEdUcb;
  int best_expert = 0;
  std::optional<double> t_clip;
  std::optional<double> tau_1;
  std::optional<double> t_1;
  std::vector<ExpertTimes> suboptimal;

  nlohmann::json to_json() const;
};

// Smallest t >= 1 from which `holds` is true for every later time, assuming
// `holds` is monotone (false then true) from t = 3 on. Empty if no such t
// below 2^62.
std::optional<double> first_time_from(const std::function<bool(double)>& holds);

// tau_1 = first t with C w(sqrt(log t / t)) <= gamma.
std::optional<double> tau_best(double c, double gamma);

// tau_k = first t with t / log t >= 9 C^2 M^2 log^2(6C / g) / g^2, where
// g = gap - gamma p_v for ED-UCB and g = gap with M = 1 for D-UCB.
std::optional<double> tau_suboptimal(double c, double m, double effective_gap);

// T_clip = first t with max_key <= 2 log(2 / eps(t)), eps(t) = C w(M sqrt(log t / t)),
// i.e. the clip level under the pessimistic normalizer Z = t / M.
std::optional<double> t_clip_time(double c, double m, double max_key);

// Times for one episode. Ratio keys come from the true policies: with
// offsets of width `xi` and lower divergences for the ED-UCB variant, exact
// divergences under p_e for the D-UCB variant.
AnalysisTimes analysis_times(const Instance& instance, int episode, double c,
                             double m, GapVariant variant, double xi = 0.0);

}  // namespace edbandit

#endif  // EDBANDIT_HARNESS_H_
