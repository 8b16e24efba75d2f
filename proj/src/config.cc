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

#include <fstream>
#include <string>

#include "edbandit/errors.h"
#include "edbandit/harness.h"
#include "edbandit/instance_io.h"

namespace edbandit {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key +
                      "': " + e.what());
  }
}

template <typename T>
T need(const json& obj, const char* key) {
  if (!obj.contains(key)) {
    throw ConfigError(std::string("config: missing key '") + key + "'");
  }
  return get_or<T>(obj, key, T{});
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

AgentConfig parse_agent(const json& a) {
  if (!a.is_object()) throw ConfigError("config: agent entries must be objects");
  AgentConfig cfg;
  cfg.kind = agent_kind_from_string(need<std::string>(a, "kind"));
  if (a.contains("c")) cfg.c_override = get_or<double>(a, "c", 0.0);
  if (a.contains("xi")) cfg.xi = get_or<double>(a, "xi", 0.0);
  if (a.contains("delta")) cfg.delta = get_or<double>(a, "delta", 0.0);
  if (a.contains("exploration")) {
    cfg.exploration =
        exploration_fn_from_string(get_or<std::string>(a, "exploration", ""));
  }
  cfg.label = get_or<std::string>(a, "label", "");
  if (cfg.c_override && !(*cfg.c_override > 0.0)) {
    throw ConfigError("config: agent clip constant c must be positive");
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const json& doc,
                              const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig cfg;

  const json inst = need<json>(doc, "instance");
  if (inst.contains("file")) {
    cfg.instance_file = resolve(base_dir, need<std::string>(inst, "file"));
  } else if (inst.contains("generate")) {
    const json g = inst.at("generate");
    GeneratorSpec spec;
    const json d = need<json>(g, "dims");
    spec.dims.num_contexts = need<int>(d, "num_contexts");
    spec.dims.num_actions = need<int>(d, "num_actions");
    spec.dims.num_experts = need<int>(d, "num_experts");
    spec.dims.num_episodes = need<int>(d, "num_episodes");
    spec.dims.horizon = need<std::int64_t>(d, "horizon");
    spec.dims.validate();
    const json p = need<json>(g, "params");
    spec.params.p_x = need<double>(p, "p_x");
    spec.params.p_v = need<double>(p, "p_v");
    spec.seed = get_or<std::uint64_t>(g, "seed", 0);
    spec.min_gap = get_or<double>(g, "min_gap", 0.0);
    spec.max_tries = get_or<int>(g, "max_tries", 1000000);
    cfg.generator = spec;
  } else {
    throw ConfigError("config: instance needs 'file' or 'generate'");
  }

  const json agents = need<json>(doc, "agents");
  if (!agents.is_array() || agents.empty()) {
    throw ConfigError("config: 'agents' must be a nonempty list");
  }
  for (const auto& a : agents) cfg.agents.push_back(parse_agent(a));

  if (doc.contains("episodes")) cfg.episodes = get_or<int>(doc, "episodes", 0);
  if (doc.contains("horizon")) {
    cfg.horizon = get_or<std::int64_t>(doc, "horizon", 0);
  }
  cfg.num_runs = get_or<int>(doc, "num_runs", 1);
  cfg.base_seed = get_or<std::uint64_t>(doc, "base_seed", 0);
  cfg.checkpoint_every = get_or<std::int64_t>(doc, "checkpoint_every", 100);
  cfg.threads = get_or<int>(doc, "threads", 0);
  cfg.diagnostics = get_or<bool>(doc, "diagnostics", false);
  if (cfg.num_runs < 1) throw ConfigError("config: num_runs must be >= 1");
  if (cfg.checkpoint_every < 1) {
    throw ConfigError("config: checkpoint_every must be >= 1");
  }
  if (cfg.threads < 0) throw ConfigError("config: threads must be >= 0");

  if (doc.contains("bootstrap")) {
    const json b = doc.at("bootstrap");
    const auto mode = get_or<std::string>(b, "mode", "offline");
    if (mode == "offline") {
      cfg.bootstrap.mode = BootstrapMode::kOffline;
    } else if (mode == "online") {
      cfg.bootstrap.mode = BootstrapMode::kOnline;
    } else if (mode == "exact") {
      cfg.bootstrap.mode = BootstrapMode::kExact;
    } else {
      throw ConfigError("config: unknown bootstrap mode '" + mode + "'");
    }
    if (b.contains("override")) {
      const json o = b.at("override");
      BootstrapOverride ov;
      // Zero marks "derive from the theory formulas" for xi and a.
      ov.xi = get_or<double>(o, "xi", 0.0);
      ov.n = need<std::uint64_t>(o, "n");
      ov.a = get_or<std::uint64_t>(o, "a", 0);
      cfg.bootstrap.practical_override = ov;
    }
    cfg.bootstrap.prior = get_or<std::vector<double>>(b, "prior", {});
  }

  if (doc.contains("output")) {
    const json o = doc.at("output");
    if (o.contains("trace")) {
      cfg.trace_path = resolve(base_dir, need<std::string>(o, "trace"));
    }
    if (o.contains("summary")) {
      cfg.summary_path = resolve(base_dir, need<std::string>(o, "summary"));
    }
    if (o.contains("diagnostics")) {
      cfg.diagnostics_path =
          resolve(base_dir, need<std::string>(o, "diagnostics"));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace edbandit
