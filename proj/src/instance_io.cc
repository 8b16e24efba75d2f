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

#include "edbandit/instance_io.h"

#include <fstream>
#include <string>

#include "edbandit/errors.h"

namespace edbandit {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string("instance: missing key '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("instance: bad value for '") + key +
                      "': " + e.what());
  }
}

}  // namespace

json instance_to_json(const Instance& inst) {
  const auto& d = inst.dims;
  json doc;
  doc["dims"] = {{"num_contexts", d.num_contexts},
                 {"num_actions", d.num_actions},
                 {"num_experts", d.num_experts},
                 {"num_episodes", d.num_episodes},
                 {"horizon", d.horizon}};
  doc["params"] = {{"p_x", inst.params.p_x},
                   {"p_v", inst.params.p_v},
                   {"gamma", inst.params.gamma}};
  json policies = json::array();
  for (int i = 0; i < inst.policies.num_experts(); ++i) {
    json expert = json::array();
    for (int x = 0; x < inst.policies.num_contexts(); ++x) {
      const auto r = inst.policies.row(i, x);
      expert.push_back(std::vector<double>(r.begin(), r.end()));
    }
    policies.push_back(std::move(expert));
  }
  doc["policies"] = std::move(policies);
  json episodes = json::array();
  for (const auto& ep : inst.episodes) {
    json means = json::array();
    for (int x = 0; x < ep.num_contexts(); ++x) {
      means.push_back(std::vector<double>(
          ep.reward_means.begin() + static_cast<std::ptrdiff_t>(x) * ep.num_actions,
          ep.reward_means.begin() +
              static_cast<std::ptrdiff_t>(x + 1) * ep.num_actions));
    }
    episodes.push_back(
        {{"context_dist", ep.context_dist}, {"reward_means", std::move(means)}});
  }
  doc["episodes"] = std::move(episodes);
  return doc;
}

Instance instance_from_json(const json& doc) {
  Instance inst;
  const json dims = required<json>(doc, "dims");
  inst.dims.num_contexts = required<int>(dims, "num_contexts");
  inst.dims.num_actions = required<int>(dims, "num_actions");
  inst.dims.num_experts = required<int>(dims, "num_experts");
  inst.dims.num_episodes = required<int>(dims, "num_episodes");
  inst.dims.horizon = required<std::int64_t>(dims, "horizon");
  inst.dims.validate();
  const json params = required<json>(doc, "params");
  inst.params.p_x = required<double>(params, "p_x");
  inst.params.p_v = required<double>(params, "p_v");
  inst.params.gamma = required<double>(params, "gamma");

  const auto& d = inst.dims;
  const auto policies =
      required<std::vector<std::vector<std::vector<double>>>>(doc, "policies");
  if (static_cast<int>(policies.size()) != d.num_experts) {
    throw ConfigError("instance: policies has the wrong number of experts");
  }
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(d.num_experts) * d.num_contexts *
               d.num_actions);
  for (const auto& expert : policies) {
    if (static_cast<int>(expert.size()) != d.num_contexts) {
      throw ConfigError("instance: policy has the wrong number of contexts");
    }
    for (const auto& row : expert) {
      if (static_cast<int>(row.size()) != d.num_actions) {
        throw ConfigError("instance: policy row has the wrong number of actions");
      }
      flat.insert(flat.end(), row.begin(), row.end());
    }
  }
  inst.policies =
      PolicyTable(d.num_experts, d.num_contexts, d.num_actions, std::move(flat));

  const json episodes = required<json>(doc, "episodes");
  if (!episodes.is_array() ||
      static_cast<int>(episodes.size()) != d.num_episodes) {
    throw ConfigError("instance: episodes has the wrong length");
  }
  for (const auto& e : episodes) {
    EpisodeModel ep;
    ep.num_actions = d.num_actions;
    ep.context_dist = required<std::vector<double>>(e, "context_dist");
    if (static_cast<int>(ep.context_dist.size()) != d.num_contexts) {
      throw ConfigError("instance: context_dist has the wrong length");
    }
    const auto means =
        required<std::vector<std::vector<double>>>(e, "reward_means");
    if (static_cast<int>(means.size()) != d.num_contexts) {
      throw ConfigError("instance: reward_means has the wrong number of rows");
    }
    for (const auto& row : means) {
      if (static_cast<int>(row.size()) != d.num_actions) {
        throw ConfigError("instance: reward_means row has the wrong length");
      }
      ep.reward_means.insert(ep.reward_means.end(), row.begin(), row.end());
    }
    inst.episodes.push_back(std::move(ep));
  }
  return inst;
}

void save_instance(const Instance& instance,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << instance_to_json(instance).dump(2) << '\n';
  if (!out) throw ConfigError("failed writing " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  Instance inst = instance_from_json(doc);
  validate_instance(inst);
  return inst;
}

}  // namespace edbandit
