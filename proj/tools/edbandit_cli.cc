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

// Command-line front end: generate, ingest, run, bootstrap-calc, diagnose.
//
// Exit codes: 0 success, 1 configuration or input error, 2 assumption
// violation.

#include <cmath>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "edbandit/bootstrap.h"
#include "edbandit/divergence.h"
#include "edbandit/errors.h"
#include "edbandit/harness.h"
#include "edbandit/instance.h"
#include "edbandit/instance_io.h"
#include "json.hpp"

namespace {

using edbandit::AssumptionViolation;
using edbandit::ConfigError;
using nlohmann::json;

constexpr int kConfigError = 1;
constexpr int kAssumptionViolation = 2;

void add_dims(CLI::App* cmd, edbandit::ProblemDims& d, bool with_contexts) {
  if (with_contexts) {
    cmd->add_option("--contexts", d.num_contexts, "number of contexts")
        ->required();
    cmd->add_option("--actions", d.num_actions, "number of actions")
        ->required();
  }
  cmd->add_option("--experts", d.num_experts, "number of experts")->required();
  cmd->add_option("--episodes", d.num_episodes, "number of episodes")
      ->required();
  cmd->add_option("--horizon", d.horizon, "steps per episode")->required();
}

json bootstrap_calc(double p_x, double p_v, double gamma,
                    const edbandit::ProblemDims& dims) {
  edbandit::InstanceParams params{p_x, p_v, gamma};
  const auto plan = edbandit::make_plan(params, dims);
  json out = plan.to_json();
  out["xi_closed_form_plus"] = edbandit::xi_closed_form_plus(p_v, gamma);
  out["xi_closed_form_minus"] = edbandit::xi_closed_form_minus(p_v, gamma);
  out["xi_below_p_v"] = plan.xi < p_v;
  out["coverage_failure_bound"] =
      1.0 / (static_cast<double>(dims.horizon) *
             std::sqrt(static_cast<double>(dims.num_episodes)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Episodic bandits with stochastic experts"};
  app.require_subcommand(1);

  // generate
  edbandit::ProblemDims gen_dims;
  edbandit::InstanceParams gen_params;
  std::uint64_t gen_seed = 0;
  double gen_min_gap = 0.0;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "write a random instance");
  add_dims(gen, gen_dims, true);
  gen->add_option("--p-x", gen_params.p_x, "context probability floor")
      ->required();
  gen->add_option("--p-v", gen_params.p_v, "action probability floor")
      ->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--min-gap", gen_min_gap,
                  "retry seeds until every episode has this best-vs-second gap");
  gen->add_option("-o,--output", gen_out, "instance file")->required();

  // ingest
  std::string ing_ratings, ing_clusters, ing_out;
  int ing_top_k = 5;
  edbandit::ProblemDims ing_dims;
  edbandit::InstanceParams ing_params;
  std::uint64_t ing_seed = 0;
  auto* ing = app.add_subcommand("ingest", "build an instance from ratings");
  ing->add_option("--ratings", ing_ratings, "ratings CSV (users x items)")
      ->required();
  ing->add_option("--clusters", ing_clusters, "user,context CSV")->required();
  ing->add_option("--top-k", ing_top_k, "number of items kept as actions");
  add_dims(ing, ing_dims, false);
  ing->add_option("--p-x", ing_params.p_x, "context probability floor")
      ->required();
  ing->add_option("--p-v", ing_params.p_v, "action probability floor")
      ->required();
  ing->add_option("--seed", ing_seed, "seed for experts and contexts");
  ing->add_option("-o,--output", ing_out, "instance file")->required();

  // run
  std::string run_config;
  int run_threads = -1;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", run_config, "experiment config JSON")->required();
  run->add_option("--threads", run_threads, "override worker threads");

  // bootstrap-calc
  double bc_px = 0, bc_pv = 0, bc_gamma = 0;
  edbandit::ProblemDims bc_dims;
  auto* bc = app.add_subcommand("bootstrap-calc",
                                "print xi, n, A and the achieved delta");
  bc->add_option("--p-x", bc_px)->required();
  bc->add_option("--p-v", bc_pv)->required();
  bc->add_option("--gamma", bc_gamma)->required();
  add_dims(bc, bc_dims, true);

  // diagnose
  std::string dg_instance, dg_variant = "ed_ucb";
  double dg_c = 0.25;
  double dg_m = 0.0;
  double dg_xi = -1.0;
  auto* dg = app.add_subcommand("diagnose", "print analysis times per episode");
  dg->add_option("--instance", dg_instance)->required();
  dg->add_option("--c", dg_c, "clip constant C");
  dg->add_option("--m", dg_m, "divergence bound M (default: instance bound)");
  dg->add_option("--xi", dg_xi, "ratio offset xi (default: target root)");
  dg->add_option("--variant", dg_variant, "ed_ucb or d_ucb")
      ->check(CLI::IsMember({"ed_ucb", "d_ucb"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  try {
    if (*gen) {
      edbandit::GeneratorSpec spec{gen_dims, gen_params, gen_seed, gen_min_gap};
      std::uint64_t used = gen_seed;
      const auto inst = edbandit::generate_with_gap(spec, &used);
      edbandit::save_instance(inst, gen_out);
      std::cout << json{{"output", gen_out},
                        {"seed", used},
                        {"gamma", inst.params.gamma}}
                       .dump()
                << '\n';
    } else if (*ing) {
      const auto skel =
          edbandit::ingest_ratings(ing_ratings, ing_clusters, ing_top_k);
      const auto inst = edbandit::instance_from_ratings(
          skel, ing_dims.num_experts, ing_dims.num_episodes, ing_dims.horizon,
          ing_params, ing_seed);
      edbandit::validate_instance(inst);
      edbandit::save_instance(inst, ing_out);
      std::cout << json{{"output", ing_out},
                        {"actions", skel.actions},
                        {"num_contexts", skel.num_contexts},
                        {"gamma", inst.params.gamma}}
                       .dump()
                << '\n';
    } else if (*run) {
      auto config = edbandit::load_config(run_config);
      if (run_threads >= 0) config.threads = run_threads;
      const auto result = edbandit::run_experiment(config);
      std::cout << result.summary.dump(2) << '\n';
    } else if (*bc) {
      bc_dims.validate();
      std::cout << bootstrap_calc(bc_px, bc_pv, bc_gamma, bc_dims).dump(2)
                << '\n';
    } else if (*dg) {
      const auto inst = edbandit::load_instance(dg_instance);
      const double m =
          dg_m > 0.0 ? dg_m : edbandit::divergence_upper(inst.params, inst.dims);
      const double xi = dg_xi >= 0.0
                            ? dg_xi
                            : edbandit::xi_target(inst.params.p_v,
                                                  inst.params.gamma);
      const auto variant = dg_variant == "ed_ucb"
                               ? edbandit::GapVariant::kEdUcb
                               : edbandit::GapVariant::kDUcb;
      json out = {{"c", dg_c}, {"m", m}, {"xi", xi}};
      json eps = json::array();
      for (int e = 0; e < inst.dims.num_episodes; ++e) {
        eps.push_back(
            edbandit::analysis_times(inst, e, dg_c, m, variant, xi).to_json());
      }
      out["episodes"] = eps;
      std::cout << out.dump(2) << '\n';
    }
  } catch (const AssumptionViolation& e) {
    std::cerr << "assumption violated: " << e.what() << '\n';
    return kAssumptionViolation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return 0;
}
