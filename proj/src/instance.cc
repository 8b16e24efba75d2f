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

#include "edbandit/instance.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "edbandit/errors.h"

namespace edbandit {
namespace {

constexpr double kSumTolerance = 1e-9;
// Slack for bounds such as p_v <= 1/|V| that are often set to the boundary.
constexpr double kBoundSlack = 1e-12;

std::string describe(const char* what, int a, int b) {
  std::ostringstream os;
  os << what << " (" << a << ", " << b << ")";
  return os.str();
}

void check_distribution(std::span<const double> p, const std::string& name) {
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      throw ConfigError(name + ": entries must be finite and nonnegative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ConfigError(name + ": does not sum to 1");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const std::string& where) {
  const std::string f = trim(field);
  char* end = nullptr;
  const double v = std::strtod(f.c_str(), &end);
  if (f.empty() || end != f.c_str() + f.size() || !std::isfinite(v)) {
    throw ConfigError(where + ": not a number: '" + field + "'");
  }
  return v;
}

long parse_index(const std::string& field, const std::string& where) {
  const std::string f = trim(field);
  char* end = nullptr;
  const long v = std::strtol(f.c_str(), &end, 10);
  if (f.empty() || end != f.c_str() + f.size() || v < 0) {
    throw ConfigError(where + ": not a nonnegative integer: '" + field + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void ProblemDims::validate() const {
  if (num_contexts < 1 || num_experts < 1 || num_episodes < 1 ||
      horizon < 1) {
    throw ConfigError("problem dimensions must all be positive");
  }
  if (num_actions < 2) throw ConfigError("need at least two actions");
}

void InstanceParams::validate(const ProblemDims& dims) const {
  if (!(p_x > 0.0) || p_x > 1.0 / dims.num_contexts + kBoundSlack) {
    throw AssumptionViolation("p_x must lie in (0, 1/|X|]");
  }
  if (!(p_v > 0.0) || p_v > 1.0 / dims.num_actions + kBoundSlack) {
    throw AssumptionViolation("p_v must lie in (0, 1/|V|]");
  }
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw AssumptionViolation("gamma must lie in (0, 1]");
  }
}

PolicyTable::PolicyTable(int num_experts, int num_contexts, int num_actions)
    : PolicyTable(num_experts, num_contexts, num_actions,
                  std::vector<double>(static_cast<std::size_t>(num_experts) *
                                          num_contexts * num_actions,
                                      0.0)) {}

PolicyTable::PolicyTable(int num_experts, int num_contexts, int num_actions,
                         std::vector<double> probs)
    : num_experts_(num_experts),
      num_contexts_(num_contexts),
      num_actions_(num_actions),
      probs_(std::move(probs)) {
  if (num_experts < 1 || num_contexts < 1 || num_actions < 1) {
    throw ConfigError("policy table dimensions must be positive");
  }
  if (probs_.size() != static_cast<std::size_t>(num_experts) * num_contexts *
                           num_actions) {
    throw ConfigError("policy table size does not match its dimensions");
  }
}

void PolicyTable::validate(double p_v) const {
  for (int i = 0; i < num_experts_; ++i) {
    for (int x = 0; x < num_contexts_; ++x) {
      const auto r = row(i, x);
      check_distribution(r, describe("policy row (expert, context)", i, x));
      for (double p : r) {
        if (!(p > 0.0)) {
          throw AssumptionViolation(
              describe("policy has a zero entry at (expert, context)", i, x));
        }
        if (p_v > 0.0 && p < p_v - kBoundSlack) {
          throw AssumptionViolation(
              describe("policy entry below p_v at (expert, context)", i, x));
        }
      }
    }
  }
}

double PolicyTable::min_entry() const {
  return probs_.empty() ? 0.0 : *std::min_element(probs_.begin(), probs_.end());
}

void EpisodeModel::validate(double p_x) const {
  check_distribution(context_dist, "context distribution");
  if (num_actions < 1 ||
      reward_means.size() != context_dist.size() * num_actions) {
    throw ConfigError("reward table shape does not match the episode");
  }
  for (double p : context_dist) {
    if (p_x > 0.0 && p < p_x - kBoundSlack) {
      throw AssumptionViolation("context probability below p_x");
    }
  }
  for (double q : reward_means) {
    if (!std::isfinite(q) || q < 0.0 || q > 1.0) {
      throw ConfigError("reward means must lie in [0, 1]");
    }
  }
}

double expert_mean(std::span<const double> expert_policy,
                   const EpisodeModel& episode) {
  const int nx = episode.num_contexts();
  const int nv = episode.num_actions;
  if (expert_policy.size() != static_cast<std::size_t>(nx) * nv) {
    throw ConfigError("expert policy and episode dimensions disagree");
  }
  double mean = 0.0;
  for (int x = 0; x < nx; ++x) {
    double inner = 0.0;
    for (int v = 0; v < nv; ++v) {
      inner += expert_policy[static_cast<std::size_t>(x) * nv + v] *
               episode.reward_mean(x, v);
    }
    mean += episode.context_dist[x] * inner;
  }
  return mean;
}

double expert_mean(const PolicyTable& policies, int expert,
                   const EpisodeModel& episode) {
  if (expert < 0 || expert >= policies.num_experts() ||
      policies.num_contexts() != episode.num_contexts() ||
      policies.num_actions() != episode.num_actions) {
    throw ConfigError("expert policy and episode dimensions disagree");
  }
  const std::size_t width =
      static_cast<std::size_t>(policies.num_contexts()) * policies.num_actions();
  return expert_mean(
      std::span<const double>(policies.flat()).subspan(expert * width, width),
      episode);
}

std::vector<double> expert_means(const PolicyTable& policies,
                                 const EpisodeModel& episode) {
  std::vector<double> means(policies.num_experts());
  for (int i = 0; i < policies.num_experts(); ++i) {
    means[i] = expert_mean(policies, i, episode);
  }
  return means;
}

double min_expert_mean(const Instance& instance) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& ep : instance.episodes) {
    for (double m : expert_means(instance.policies, ep)) lo = std::min(lo, m);
  }
  return lo;
}

void validate_instance(const Instance& instance) {
  const auto& d = instance.dims;
  d.validate();
  if (instance.policies.num_experts() != d.num_experts ||
      instance.policies.num_contexts() != d.num_contexts ||
      instance.policies.num_actions() != d.num_actions) {
    throw ConfigError("policy table does not match dims");
  }
  if (static_cast<int>(instance.episodes.size()) != d.num_episodes) {
    throw ConfigError("episode count does not match dims");
  }
  for (const auto& ep : instance.episodes) {
    if (ep.num_contexts() != d.num_contexts || ep.num_actions != d.num_actions) {
      throw ConfigError("episode model does not match dims");
    }
  }
  instance.params.validate(d);
  instance.policies.validate(instance.params.p_v);
  for (const auto& ep : instance.episodes) ep.validate(instance.params.p_x);
  if (min_expert_mean(instance) < instance.params.gamma - kBoundSlack) {
    throw AssumptionViolation("an expert mean falls below gamma");
  }
}

void sample_simplex(Rng& rng, std::span<double> out, double mass) {
  double total = 0.0;
  for (double& v : out) {
    v = rng.exponential();
    total += v;
  }
  if (total <= 0.0) {
    std::fill(out.begin(), out.end(), mass / out.size());
    return;
  }
  for (double& v : out) v = mass * v / total;
}

std::vector<double> sample_floored_distribution(Rng& rng, int n, double floor) {
  std::vector<double> p(n);
  const double free_mass = std::max(0.0, 1.0 - n * floor);
  sample_simplex(rng, p, free_mass);
  for (double& v : p) v += floor;
  return p;
}

PolicyTable sample_policies(Rng& rng, int num_experts, int num_contexts,
                            int num_actions, double p_v) {
  PolicyTable table(num_experts, num_contexts, num_actions);
  for (int i = 0; i < num_experts; ++i) {
    for (int x = 0; x < num_contexts; ++x) {
      const auto p = sample_floored_distribution(rng, num_actions, p_v);
      std::copy(p.begin(), p.end(), table.row(i, x).begin());
    }
  }
  return table;
}

namespace {

std::vector<EpisodeModel> sample_context_dists(
    Rng& rng, int num_episodes, int num_contexts, int num_actions,
    double p_x, const std::vector<double>* fixed_rewards) {
  std::vector<EpisodeModel> episodes(num_episodes);
  for (auto& ep : episodes) {
    ep.num_actions = num_actions;
    ep.context_dist = sample_floored_distribution(rng, num_contexts, p_x);
    if (fixed_rewards != nullptr) {
      ep.reward_means = *fixed_rewards;
    } else {
      ep.reward_means.resize(static_cast<std::size_t>(num_contexts) *
                             num_actions);
      for (double& q : ep.reward_means) q = rng.uniform();
    }
  }
  return episodes;
}

void check_feasible(const ProblemDims& dims, const InstanceParams& params) {
  dims.validate();
  if (!(params.p_x > 0.0) || params.p_x > 1.0 / dims.num_contexts + kBoundSlack) {
    throw AssumptionViolation("p_x must lie in (0, 1/|X|]");
  }
  if (!(params.p_v > 0.0) || params.p_v > 1.0 / dims.num_actions + kBoundSlack) {
    throw AssumptionViolation("p_v must lie in (0, 1/|V|]");
  }
}

}  // namespace

Instance generate_synthetic(const ProblemDims& dims,
                            const InstanceParams& params, std::uint64_t seed) {
  check_feasible(dims, params);
  Rng rng = Rng::stream({seed, static_cast<std::uint64_t>(
                                   StreamPurpose::kGenerator)});
  Instance inst;
  inst.dims = dims;
  inst.params = params;
  inst.policies = sample_policies(rng, dims.num_experts, dims.num_contexts,
                                  dims.num_actions, params.p_v);
  inst.episodes = sample_context_dists(rng, dims.num_episodes,
                                       dims.num_contexts, dims.num_actions,
                                       params.p_x, nullptr);
  inst.params.gamma = min_expert_mean(inst);
  if (!(inst.params.gamma > 0.0)) {
    throw AssumptionViolation("generated instance has an expert with mean 0");
  }
  return inst;
}

RatingsSkeleton ingest_ratings(const std::filesystem::path& ratings_file,
                               const std::filesystem::path& clusters_file,
                               int top_k) {
  std::ifstream rin(ratings_file);
  if (!rin) throw ConfigError("cannot read " + ratings_file.string());
  std::vector<std::vector<double>> ratings;
  std::string line;
  int lineno = 0;
  while (std::getline(rin, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where =
        ratings_file.string() + ":" + std::to_string(lineno);
    std::vector<double> row;
    for (const auto& f : split(line, ',')) {
      const double r = parse_double(f, where);
      if (r < 0.0 || r > 1.0) throw ConfigError(where + ": rating outside [0,1]");
      row.push_back(r);
    }
    if (!ratings.empty() && row.size() != ratings.front().size()) {
      throw ConfigError(where + ": ragged ratings matrix");
    }
    ratings.push_back(std::move(row));
  }
  if (ratings.empty()) throw ConfigError("ratings matrix is empty");
  const int num_users = static_cast<int>(ratings.size());
  const int num_items = static_cast<int>(ratings.front().size());
  if (top_k < 1 || top_k > num_items) {
    throw ConfigError("top_k must lie in [1, number of items]");
  }

  std::ifstream cin(clusters_file);
  if (!cin) throw ConfigError("cannot read " + clusters_file.string());
  std::vector<int> cluster(num_users, -1);
  lineno = 0;
  while (std::getline(cin, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where =
        clusters_file.string() + ":" + std::to_string(lineno);
    const auto fields = split(line, ',');
    if (fields.size() != 2) throw ConfigError(where + ": expected user,context");
    const long user = parse_index(fields[0], where);
    const long ctx = parse_index(fields[1], where);
    if (user >= num_users) throw ConfigError(where + ": user index out of range");
    if (cluster[user] != -1) throw ConfigError(where + ": user assigned twice");
    cluster[user] = static_cast<int>(ctx);
  }
  int num_contexts = 0;
  for (int u = 0; u < num_users; ++u) {
    if (cluster[u] < 0) {
      throw ConfigError("user " + std::to_string(u) + " has no context");
    }
    num_contexts = std::max(num_contexts, cluster[u] + 1);
  }

  std::vector<double> item_mean(num_items, 0.0);
  for (const auto& row : ratings) {
    for (int j = 0; j < num_items; ++j) item_mean[j] += row[j];
  }
  std::vector<int> order(num_items);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return item_mean[a] > item_mean[b];
  });

  RatingsSkeleton out;
  out.num_contexts = num_contexts;
  out.actions.assign(order.begin(), order.begin() + top_k);
  out.users_per_context.assign(num_contexts, 0);
  for (int u = 0; u < num_users; ++u) ++out.users_per_context[cluster[u]];
  for (int x = 0; x < num_contexts; ++x) {
    if (out.users_per_context[x] == 0) {
      throw ConfigError("context " + std::to_string(x) + " has no users");
    }
  }
  out.reward_means.assign(static_cast<std::size_t>(num_contexts) * top_k, 0.0);
  for (int u = 0; u < num_users; ++u) {
    for (int a = 0; a < top_k; ++a) {
      out.reward_means[static_cast<std::size_t>(cluster[u]) * top_k + a] +=
          ratings[u][out.actions[a]];
    }
  }
  for (int x = 0; x < num_contexts; ++x) {
    for (int a = 0; a < top_k; ++a) {
      out.reward_means[static_cast<std::size_t>(x) * top_k + a] /=
          out.users_per_context[x];
    }
  }
  return out;
}

Instance instance_from_ratings(const RatingsSkeleton& skeleton,
                               int num_experts, int num_episodes,
                               std::int64_t horizon,
                               const InstanceParams& params,
                               std::uint64_t seed) {
  ProblemDims dims;
  dims.num_contexts = skeleton.num_contexts;
  dims.num_actions = static_cast<int>(skeleton.actions.size());
  dims.num_experts = num_experts;
  dims.num_episodes = num_episodes;
  dims.horizon = horizon;
  check_feasible(dims, params);
  Rng rng =
      Rng::stream({seed, static_cast<std::uint64_t>(StreamPurpose::kIngest)});
  Instance inst;
  inst.dims = dims;
  inst.params = params;
  inst.policies = sample_policies(rng, num_experts, dims.num_contexts,
                                  dims.num_actions, params.p_v);
  inst.episodes =
      sample_context_dists(rng, num_episodes, dims.num_contexts,
                           dims.num_actions, params.p_x, &skeleton.reward_means);
  inst.params.gamma = min_expert_mean(inst);
  if (!(inst.params.gamma > 0.0)) {
    throw AssumptionViolation("an expert has mean reward 0 under the ratings");
  }
  return inst;
}

double bernoulli_reward(double mean, Rng& rng) {
  return rng.bernoulli(mean) ? 1.0 : 0.0;
}

Step sample_step(const Instance& instance, int episode, int expert, Rng& rng,
                 const RewardSampler& reward) {
  if (episode < 0 || episode >= static_cast<int>(instance.episodes.size()) ||
      expert < 0 || expert >= instance.policies.num_experts()) {
    throw std::out_of_range("sample_step: index out of range");
  }
  const auto& ep = instance.episodes[episode];
  Step s;
  s.context = rng.categorical(ep.context_dist);
  s.action = rng.categorical(instance.policies.row(expert, s.context));
  s.reward = reward(ep.reward_mean(s.context, s.action), rng);
  return s;
}

}  // namespace edbandit
