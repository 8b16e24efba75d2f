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

#include "edbandit/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "edbandit/errors.h"
#include "edbandit/instance_io.h"

namespace edbandit {

using nlohmann::json;

namespace {

// Sampling budgets above this are refused unless overridden explicitly.
constexpr std::uint64_t kMaxBootstrapDraws = 1'000'000'000ULL;

bool uses(const ExperimentConfig& config, AgentKind kind) {
  return std::any_of(config.agents.begin(), config.agents.end(),
                     [kind](const AgentConfig& a) { return a.kind == kind; });
}

}  // namespace

double min_episode_gap(const Instance& instance) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& ep : instance.episodes) {
    auto means = expert_means(instance.policies, ep);
    if (means.size() < 2) continue;
    std::partial_sort(means.begin(), means.begin() + 2, means.end(),
                      std::greater<>());
    gap = std::min(gap, means[0] - means[1]);
  }
  return gap;
}

Instance generate_with_gap(const GeneratorSpec& spec, std::uint64_t* used_seed) {
  for (int attempt = 0; attempt < std::max(1, spec.max_tries); ++attempt) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(attempt);
    Instance inst = generate_synthetic(spec.dims, spec.params, seed);
    if (spec.min_gap <= 0.0 || min_episode_gap(inst) >= spec.min_gap) {
      if (used_seed != nullptr) *used_seed = seed;
      return inst;
    }
  }
  throw ConfigError("no generated instance met min_gap within max_tries");
}

Instance resolve_instance(const ExperimentConfig& config) {
  Instance inst;
  if (config.instance_file) {
    inst = load_instance(*config.instance_file);
  } else if (config.generator) {
    inst = generate_with_gap(*config.generator);
  } else {
    throw ConfigError("config names no instance");
  }
  if (config.episodes) {
    if (*config.episodes < 1 || *config.episodes > inst.dims.num_episodes) {
      throw ConfigError("episodes override exceeds the instance's episodes");
    }
    inst.episodes.resize(*config.episodes);
    inst.dims.num_episodes = *config.episodes;
    inst.params.gamma = std::min(inst.params.gamma, min_expert_mean(inst));
  }
  if (config.horizon) {
    if (*config.horizon < 1) throw ConfigError("horizon must be positive");
    inst.dims.horizon = *config.horizon;
  }
  validate_instance(inst);
  const std::int64_t t = inst.dims.horizon;
  if (config.checkpoint_every != 1 && t % config.checkpoint_every != 0) {
    throw ConfigError("checkpoint_every must divide the horizon");
  }
  return inst;
}

void play_episode(Agent& agent, const Instance& instance, int episode,
                  std::int64_t horizon, Rng& rng,
                  const StepObserver& observer) {
  for (std::int64_t s = 1; s <= horizon; ++s) {
    const int k = agent.select_expert();
    const Step step = sample_step(instance, episode, k, rng);
    agent.observe(k, step.context, step.action, step.reward);
    if (observer) observer(s, k, step);
  }
}

SharedTables prepare_shared(const ExperimentConfig& config,
                            const Instance& instance) {
  SharedTables shared;
  shared.plan = make_plan(instance.params, instance.dims);
  if (config.bootstrap.practical_override) {
    BootstrapOverride ov = *config.bootstrap.practical_override;
    if (ov.xi <= 0.0) ov.xi = shared.plan.xi;
    if (ov.n < 1) throw ConfigError("bootstrap override needs n >= 1");
    if (ov.a == 0) {
      ov.a = a_samples(ov.n, instance.params.p_x, instance.dims.num_contexts,
                       instance.dims.num_experts, instance.dims.horizon,
                       instance.dims.num_episodes);
    }
    if (ov.a < ov.n) throw ConfigError("bootstrap override needs a >= n");
    shared.plan.practical_override = ov;
  }
  if (uses(config, AgentKind::kDUcb)) {
    for (const auto& ep : instance.episodes) {
      shared.d_ucb.push_back(build_d_ucb_tables(
          instance.policies, ep.context_dist, instance.params, instance.dims));
    }
  }
  shared.ed_ucb_exact.resize(config.agents.size());
  for (std::size_t a = 0; a < config.agents.size(); ++a) {
    const AgentConfig& ac = config.agents[a];
    if (ac.kind != AgentKind::kEdUcb) continue;
    const double xi = ac.xi.value_or(shared.plan.used_xi());
    if (!(xi >= 0.0) || !(xi < instance.params.p_v)) {
      throw ConfigError("ed_ucb needs 0 <= xi < p_v");
    }
    if (config.bootstrap.mode == BootstrapMode::kExact) {
      shared.ed_ucb_exact[a] = build_ed_ucb_tables(
          instance.policies, xi, instance.params, instance.dims);
    }
  }
  if (uses(config, AgentKind::kEdUcb) &&
      config.bootstrap.mode != BootstrapMode::kExact &&
      shared.plan.used_a() > kMaxBootstrapDraws) {
    throw ConfigError(
        "theory-scale bootstrap needs more than 1e9 draws per expert; set "
        "bootstrap.override");
  }
  return shared;
}

double online_bootstrap_regret(const BootstrapPlan& plan,
                               const Instance& instance) {
  const auto means = expert_means(instance.policies, instance.episodes.front());
  const double best = *std::max_element(means.begin(), means.end());
  return static_cast<double>(plan.used_a()) * instance.dims.num_experts * best;
}

RegretTrace run_single(const ExperimentConfig& config, const Instance& instance,
                       const SharedTables& shared, int run) {
  RegretTrace out;
  const int num_episodes = instance.dims.num_episodes;
  const std::int64_t horizon = instance.dims.horizon;
  out.num_runs = 1;
  out.num_episodes = num_episodes;
  out.horizon = horizon;
  out.checkpoint_every = config.checkpoint_every;
  for (const auto& ep : instance.episodes) {
    out.expert_means.push_back(expert_means(instance.policies, ep));
    out.best_means.push_back(*std::max_element(out.expert_means.back().begin(),
                                               out.expert_means.back().end()));
  }
  const auto run_word = static_cast<std::uint64_t>(run);

  // Bootstrap once per run, shared by every ED-UCB agent in it.
  std::optional<ApproxPolicies> approx;
  const bool needs_sampling = uses(config, AgentKind::kEdUcb) &&
                              config.bootstrap.mode != BootstrapMode::kExact;
  if (needs_sampling) {
    std::vector<double> prior = config.bootstrap.prior;
    if (prior.empty()) prior = instance.episodes.front().context_dist;
    const std::uint64_t seed =
        Rng::stream({config.base_seed,
                     static_cast<std::uint64_t>(StreamPurpose::kBootstrap),
                     run_word})
            .next_u64();
    const auto counts =
        sample_offline(instance.policies, prior, instance.params.p_x,
                       shared.plan.used_n(), shared.plan.used_a(), seed);
    approx = build_approx_policies(counts, shared.plan.used_xi(),
                                   1.0 / static_cast<double>(horizon),
                                   shared.plan.used_n());
  }

  AgentKnowledge knowledge;
  knowledge.params = instance.params;
  knowledge.dims = instance.dims;
  knowledge.true_policies = &instance.policies;
  if (approx) knowledge.approx_policies = &approx->policies;

  for (std::size_t a = 0; a < config.agents.size(); ++a) {
    const AgentConfig& ac = config.agents[a];
    out.algorithms.push_back(ac.name());
    double cum = 0.0;
    IsAgentTables ed_tables;
    if (ac.kind == AgentKind::kEdUcb) {
      if (config.bootstrap.mode == BootstrapMode::kOnline) {
        cum = online_bootstrap_regret(shared.plan, instance);
      }
      if (shared.ed_ucb_exact[a]) {
        ed_tables = *shared.ed_ucb_exact[a];
      } else {
        ed_tables = build_ed_ucb_tables(approx->policies,
                                        ac.xi.value_or(shared.plan.used_xi()),
                                        instance.params, instance.dims);
      }
    }
    out.initial_regret.push_back(cum);

    Rng rng = Rng::stream(
        {config.base_seed,
         static_cast<std::uint64_t>(StreamPurpose::kEnvironment), run_word,
         static_cast<std::uint64_t>(a)});
    for (int e = 0; e < num_episodes; ++e) {
      knowledge.context_dist = instance.episodes[e].context_dist;
      const IsAgentTables& tables =
          ac.kind == AgentKind::kDUcb ? shared.d_ucb[e] : ed_tables;
      std::unique_ptr<Agent> agent = make_agent(ac, knowledge, tables);
      const auto& means = out.expert_means[e];
      const double best = out.best_means[e];
      const std::int64_t offset = static_cast<std::int64_t>(e) * horizon;
      play_episode(*agent, instance, e, horizon, rng,
                   [&](std::int64_t s, int k, const Step&) {
                     cum += best - means[k];
                     if (s % config.checkpoint_every != 0 && s != horizon) {
                       return;
                     }
                     out.records.push_back(
                         {ac.name(), run, e, offset + s, cum});
                     if (!config.diagnostics) return;
                     const auto diag = agent->diagnostics();
                     for (int i = 0; i < static_cast<int>(diag.size()); ++i) {
                       out.diagnostics.push_back({ac.name(), run, e, offset + s,
                                                  agent->steps(), i, diag[i]});
                     }
                   });
    }
  }
  return out;
}

RegretTrace replicate(const ExperimentConfig& config,
                      const Instance& instance) {
  return replicate(config, instance, prepare_shared(config, instance));
}

RegretTrace replicate(const ExperimentConfig& config, const Instance& instance,
                      const SharedTables& shared) {
  std::vector<RegretTrace> runs(config.num_runs);
  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, config.num_runs);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int r = next.fetch_add(1); r < config.num_runs;
         r = next.fetch_add(1)) {
      try {
        runs[r] = run_single(config, instance, shared, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  RegretTrace merged = std::move(runs.front());
  merged.num_runs = config.num_runs;
  for (int r = 1; r < config.num_runs; ++r) {
    auto& rt = runs[r];
    merged.records.insert(merged.records.end(), rt.records.begin(),
                          rt.records.end());
    merged.diagnostics.insert(merged.diagnostics.end(), rt.diagnostics.begin(),
                              rt.diagnostics.end());
  }
  return merged;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const Instance instance = resolve_instance(config);
  ExperimentResult result;
  const SharedTables shared = prepare_shared(config, instance);
  result.trace = replicate(config, instance, shared);
  json extra = {{"bootstrap", shared.plan.to_json()},
                {"gamma", instance.params.gamma},
                {"expert_means", result.trace.expert_means}};
  result.summary = summarize(result.trace);
  for (auto& [k, v] : extra.items()) result.summary[k] = v;
  if (config.trace_path) emit_trace(result.trace, *config.trace_path);
  if (config.summary_path) {
    emit_summary(result.trace, *config.summary_path, extra);
  }
  if (config.diagnostics_path) {
    emit_diagnostics(result.trace, *config.diagnostics_path);
  }
  return result;
}

}  // namespace edbandit
