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

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "edbandit/errors.h"
#include "edbandit/harness.h"

namespace edbandit {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return r;
}

json to_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

}  // namespace

void emit_trace(const RegretTrace& trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "algorithm,run,episode,step,cum_regret\n";
  for (const auto& r : trace.records) {
    out << r.algorithm << ',' << r.run << ',' << r.episode << ',' << r.step
        << ',' << r.cum_regret << '\n';
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::vector<TraceRecord> parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line != "algorithm,run,episode,step,cum_regret") {
    throw ConfigError(path.string() + ": unexpected trace header");
  }
  std::vector<TraceRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    TraceRecord r;
    std::string run, episode, step, regret;
    if (!std::getline(is, r.algorithm, ',') || !std::getline(is, run, ',') ||
        !std::getline(is, episode, ',') || !std::getline(is, step, ',') ||
        !std::getline(is, regret)) {
      throw ConfigError(path.string() + ": malformed trace row: " + line);
    }
    try {
      r.run = std::stoi(run);
      r.episode = std::stoi(episode);
      r.step = std::stoll(step);
      r.cum_regret = std::stod(regret);
    } catch (const std::exception&) {
      throw ConfigError(path.string() + ": malformed trace row: " + line);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void emit_diagnostics(const RegretTrace& trace,
                      const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "algorithm,run,episode,step,agent_steps,expert,z,epsilon,error,"
         "estimate,index\n";
  for (const auto& d : trace.diagnostics) {
    out << d.algorithm << ',' << d.run << ',' << d.episode << ',' << d.step
        << ',' << d.agent_steps << ',' << d.expert << ',' << d.values.z << ','
        << d.values.epsilon << ',' << d.values.error << ','
        << d.values.estimate << ',' << d.values.index << '\n';
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

json summarize(const RegretTrace& trace) {
  // boundary[algorithm][episode][run]
  std::map<std::string, std::vector<std::vector<double>>> boundary;
  for (const auto& name : trace.algorithms) {
    boundary[name].assign(trace.num_episodes,
                          std::vector<double>(trace.num_runs, 0.0));
  }
  for (const auto& r : trace.records) {
    if (r.step == static_cast<std::int64_t>(r.episode + 1) * trace.horizon) {
      boundary[r.algorithm][r.episode][r.run] = r.cum_regret;
    }
  }
  json algos = json::object();
  for (std::size_t a = 0; a < trace.algorithms.size(); ++a) {
    const auto& name = trace.algorithms[a];
    const auto& b = boundary[name];
    const double start =
        a < trace.initial_regret.size() ? trace.initial_regret[a] : 0.0;
    json bounds = json::array();
    json per_episode = json::array();
    for (int e = 0; e < trace.num_episodes; ++e) {
      json entry = to_json(mean_std(b[e]));
      entry["episode"] = e;
      entry["step"] = static_cast<std::int64_t>(e + 1) * trace.horizon;
      bounds.push_back(entry);
      std::vector<double> inc(trace.num_runs);
      for (int r = 0; r < trace.num_runs; ++r) {
        inc[r] = b[e][r] - (e == 0 ? start : b[e - 1][r]);
      }
      json ep = to_json(mean_std(inc));
      ep["episode"] = e;
      per_episode.push_back(ep);
    }
    algos[name] = {{"boundaries", bounds},
                   {"final", to_json(mean_std(b.back()))},
                   {"episode_regret", per_episode},
                   {"initial_regret", start}};
  }
  return {{"num_runs", trace.num_runs},
          {"num_episodes", trace.num_episodes},
          {"horizon", trace.horizon},
          {"algorithms", algos}};
}

void emit_summary(const RegretTrace& trace, const std::filesystem::path& path,
                  const json& extra) {
  json doc = summarize(trace);
  if (extra.is_object()) {
    for (auto& [k, v] : extra.items()) doc[k] = v;
  }
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace edbandit
