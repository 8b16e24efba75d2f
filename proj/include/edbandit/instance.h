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

#ifndef EDBANDIT_INSTANCE_H_
#define EDBANDIT_INSTANCE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "edbandit/rng.h"

namespace edbandit {

// Sizes of the problem: contexts, actions, experts, episodes, steps per
// episode.
struct ProblemDims {
  int num_contexts = 1;
  int num_actions = 2;
  int num_experts = 1;
  int num_episodes = 1;
  std::int64_t horizon = 1;

  // Throws ConfigError unless every count is positive and num_actions >= 2.
  void validate() const;
  friend bool operator==(const ProblemDims&, const ProblemDims&) = default;
};

// Lower bounds assumed by the analysis: every context has probability at
// least p_x in every episode, every expert plays every action with
// probability at least p_v, and every expert's mean reward is at least gamma.
struct InstanceParams {
  double p_x = 0.0;
  double p_v = 0.0;
  double gamma = 0.0;

  // Range checks that do not depend on the instance contents.
  void validate(const ProblemDims& dims) const;
  friend bool operator==(const InstanceParams&,
                         const InstanceParams&) = default;
};

// Conditional action distributions pi_i(v | x), stored expert-major.
class PolicyTable {
 public:
  PolicyTable() = default;
  PolicyTable(int num_experts, int num_contexts, int num_actions);
  PolicyTable(int num_experts, int num_contexts, int num_actions,
              std::vector<double> probs);

  int num_experts() const { return num_experts_; }
  int num_contexts() const { return num_contexts_; }
  int num_actions() const { return num_actions_; }

  double operator()(int expert, int context, int action) const {
    return probs_[index(expert, context, action)];
  }
  double& operator()(int expert, int context, int action) {
    return probs_[index(expert, context, action)];
  }

  std::span<const double> row(int expert, int context) const {
    return {probs_.data() + index(expert, context, 0),
            static_cast<std::size_t>(num_actions_)};
  }
  std::span<double> row(int expert, int context) {
    return {probs_.data() + index(expert, context, 0),
            static_cast<std::size_t>(num_actions_)};
  }

  const std::vector<double>& flat() const { return probs_; }

  // Every entry strictly positive and every row sums to one within 1e-9.
  // When `p_v` is positive, every entry must also be at least p_v.
  void validate(double p_v = 0.0) const;

  double min_entry() const;

  friend bool operator==(const PolicyTable&, const PolicyTable&) = default;

 private:
  std::size_t index(int expert, int context, int action) const {
    return (static_cast<std::size_t>(expert) * num_contexts_ + context) *
               num_actions_ +
           action;
  }

  int num_experts_ = 0;
  int num_contexts_ = 0;
  int num_actions_ = 0;
  std::vector<double> probs_;
};

// One episode's environment: the context distribution p_e and the table of
// mean rewards E[Y | x, v].
struct EpisodeModel {
  std::vector<double> context_dist;
  std::vector<double> reward_means;  // [context][action], row-major
  int num_actions = 0;

  double reward_mean(int context, int action) const {
    return reward_means[static_cast<std::size_t>(context) * num_actions +
                        action];
  }
  int num_contexts() const { return static_cast<int>(context_dist.size()); }

  void validate(double p_x = 0.0) const;
  friend bool operator==(const EpisodeModel&, const EpisodeModel&) = default;
};

struct Instance {
  ProblemDims dims;
  InstanceParams params;
  PolicyTable policies;
  std::vector<EpisodeModel> episodes;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// mu_{i,e}: sum_x p_e(x) sum_v pi_i(v|x) qbar_e(x,v).
double expert_mean(std::span<const double> expert_policy,
                   const EpisodeModel& episode);
double expert_mean(const PolicyTable& policies, int expert,
                   const EpisodeModel& episode);

// Means of every expert in one episode.
std::vector<double> expert_means(const PolicyTable& policies,
                                 const EpisodeModel& episode);

// min over (expert, episode) of the expert mean.
double min_expert_mean(const Instance& instance);

// Checks shapes and Assumptions 1-3 against the stored params. Throws
// ConfigError on shape problems and AssumptionViolation otherwise.
void validate_instance(const Instance& instance);

// Draws a sample from the uniform distribution on the probability simplex,
// scaled to total mass `mass`, by normalizing independent exponentials.
void sample_simplex(Rng& rng, std::span<double> out, double mass = 1.0);

// A probability vector with every entry at least `floor`:
// floor + (1 - n * floor) * (simplex sample). With floor == 1/n the result is
// exactly uniform.
std::vector<double> sample_floored_distribution(Rng& rng, int n, double floor);

// Random policies with every entry at least p_v.
PolicyTable sample_policies(Rng& rng, int num_experts, int num_contexts,
                            int num_actions, double p_v);

// Random instance. params.gamma is ignored on input and replaced with the
// smallest expert mean over all episodes. Deterministic in `seed`.
Instance generate_synthetic(const ProblemDims& dims,
                            const InstanceParams& params, std::uint64_t seed);

// Reward means per context and the chosen item columns, as read from a fully
// observed ratings matrix.
struct RatingsSkeleton {
  int num_contexts = 0;
  std::vector<int> actions;          // selected item columns, best first
  std::vector<double> reward_means;  // [context][action], row-major
  std::vector<int> users_per_context;
};

// Reads a comma-separated ratings matrix (one user per row, values in [0,1])
// and a `user,context` assignment file, keeps the `top_k` items with the
// highest mean rating over all users, and averages each kept item's ratings
// within every context.
RatingsSkeleton ingest_ratings(const std::filesystem::path& ratings_file,
                               const std::filesystem::path& clusters_file,
                               int top_k);

// Completes a skeleton into a full instance: random experts satisfying p_v,
// one random context distribution per episode satisfying p_x, and the
// skeleton's reward means in every episode.
Instance instance_from_ratings(const RatingsSkeleton& skeleton,
                               int num_experts, int num_episodes,
                               std::int64_t horizon,
                               const InstanceParams& params,
                               std::uint64_t seed);

// Draws a reward with the given mean. The default is Bernoulli.
using RewardSampler = std::function<double(double mean, Rng& rng)>;
double bernoulli_reward(double mean, Rng& rng);

struct Step {
  int context;
  int action;
  double reward;
};

// Draws a context from the episode, an action from the expert and a reward
// for the pair.
Step sample_step(const Instance& instance, int episode, int expert, Rng& rng,
                 const RewardSampler& reward = bernoulli_reward);

}  // namespace edbandit

#endif  // EDBANDIT_INSTANCE_H_
