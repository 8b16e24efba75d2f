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


#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "edbandit/divergence.h"
#include "edbandit/instance.h"
#include "oracles.h"

namespace edbandit {
namespace {

ProblemDims dims(int x, int v, int n) {
  ProblemDims d;
  d.num_contexts = x;
  d.num_actions = v;
  d.num_experts = n;
  return d;
}

TEST(F1, Values) {
  EXPECT_EQ(f1(1.0), 0.0);
  EXPECT_EQ(f1(0.0), -1.0);
  EXPECT_NEAR(f1(2.0), 2.0 * std::exp(1.0) - 1.0, 1e-14);
  EXPECT_NEAR(f1(2.0), 4.43656, 1e-5);
}

TEST(RatioTables, ZeroXiCollapsesSandwich) {
  const auto inst = generate_synthetic(dims(3, 4, 3), {0.1, 0.1, 0}, 2);
  const auto r = ratio_tables(inst.policies, 0.0, 0.1);
  EXPECT_EQ(r.kappa(), 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int x = 0; x < 3; ++x)
        for (int v = 0; v < 4; ++v) {
          EXPECT_EQ(r.lo(i, j, x, v), r.hat(i, j, x, v));
          EXPECT_EQ(r.hi(i, j, x, v), r.hat(i, j, x, v));
          EXPECT_DOUBLE_EQ(r.hat(i, j, x, v),
                           inst.policies(i, x, v) / inst.policies(j, x, v));
        }
}

TEST(RatioTables, IdenticalPoliciesGiveOnes) {
  PolicyTable p(2, 1, 2, {0.3, 0.7, 0.3, 0.7});
  const auto r = ratio_tables(p, 0.0, 0.3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int v = 0; v < 2; ++v) EXPECT_EQ(r.hat(i, j, 0, v), 1.0);
}

TEST(RatioTables, KappaFormula) {
  const double k = 0.01 / (0.065 * 0.055) + 0.01 / (0.065 * 0.075);
  EXPECT_NEAR(ratio_sandwich_width(0.01, 0.065), k, 1e-12);
  EXPECT_NEAR(k, 4.8485, 1e-4);
  const auto inst = generate_synthetic(dims(2, 5, 3), {0.1, 0.065, 0}, 4);
  const auto r = ratio_tables(inst.policies, 0.01, 0.065);
  EXPECT_NEAR(r.kappa(), k, 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int x = 0; x < 2; ++x)
        for (int v = 0; v < 5; ++v) {
          EXPECT_LE(r.lo(i, j, x, v), r.hat(i, j, x, v));
          EXPECT_LE(r.hat(i, j, x, v), r.hi(i, j, x, v));
          EXPECT_NEAR(r.hi(i, j, x, v) - r.lo(i, j, x, v), k, 1e-12);
          EXPECT_NEAR(r.lo(i, j, x, v),
                      r.hat(i, j, x, v) - 0.01 / (0.065 * 0.055), 1e-12);
        }
  for (int x = 0; x < 2; ++x)
    for (int v = 0; v < 5; ++v) EXPECT_EQ(r.hat(1, 1, x, v), 1.0);
}

TEST(RatioTables, RejectsXiAtOrAbovePv) {
  PolicyTable p(1, 1, 2, {0.5, 0.5});
  EXPECT_THROW(ratio_tables(p, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(ratio_tables(p, -0.1, 0.5), std::invalid_argument);
  PolicyTable z(1, 1, 2, {0.0, 1.0});
  EXPECT_THROW(ratio_tables(z, 0.0, 0.5), std::invalid_argument);
}

TEST(DivergenceLower, IdenticalPoliciesGiveOne) {
  PolicyTable p(3, 2, 2, std::vector<double>(12, 0.5));
  const auto m = divergence_lower(p, ratio_tables(p, 0.0, 0.5), 0.0, 0.5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(m(i, j), 1.0);
}

TEST(DivergenceLower, MatchesFormulaAndFloor) {
  const auto inst = generate_synthetic(dims(3, 3, 3), {0.2, 0.2, 0}, 6);
  const double xi = 0.05, p_v = 0.2, p_x = 0.2;
  const auto r = ratio_tables(inst.policies, xi, p_v);
  const auto m = divergence_lower(inst.policies, r, xi, p_x);
  EXPECT_EQ(m.mode(), DivergenceMode::kEstimated);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double d = 0.0;
      for (int x = 0; x < 3; ++x)
        for (int v = 0; v < 3; ++v)
          d += (inst.policies(i, x, v) - xi) * oracle::f1(r.lo(i, j, x, v));
      d = std::max(0.0, p_x * d);
      EXPECT_NEAR(m.divergence(i, j), d, 1e-12);
      EXPECT_NEAR(m(i, j), 1.0 + std::log(1.0 + d), 1e-12);
      EXPECT_GE(m(i, j), 1.0);
    }
}

TEST(DivergenceExact, HandComputedPair) {
  PolicyTable p(2, 1, 2, {0.7, 0.3, 0.3, 0.7});
  const std::vector<double> px = {1.0};
  const auto m = divergence_exact(p, px);
  const double d12 = 0.7 * oracle::f1(0.7 / 0.3) + 0.3 * oracle::f1(0.3 / 0.7);
  EXPECT_NEAR(m.divergence(0, 1), d12, 1e-12);
  EXPECT_NEAR(m(0, 1), 1.0 + std::log(1.0 + d12), 1e-12);
  EXPECT_EQ(m(0, 0), 1.0);
  EXPECT_EQ(m(1, 1), 1.0);
  EXPECT_EQ(m.mode(), DivergenceMode::kExact);
}

TEST(DivergenceExact, NotSymmetric) {
  PolicyTable p(2, 1, 3, {0.6, 0.3, 0.1, 0.2, 0.3, 0.5});
  const std::vector<double> px = {1.0};
  const auto m = divergence_exact(p, px);
  EXPECT_NEAR(m.divergence(0, 1), oracle::divergence(p, px, 0, 1), 1e-12);
  EXPECT_NEAR(m.divergence(1, 0), oracle::divergence(p, px, 1, 0), 1e-12);
  EXPECT_GT(std::abs(m(0, 1) - m(1, 0)), 1e-3);
}

TEST(DivergenceUpper, Evaluations) {
  InstanceParams params{0.05, 0.065, 0.3};
  const auto d = dims(6, 5, 4);
  const double formula = 0.95 * 6 * 5 * oracle::f1(0.935 / 0.065);
  EXPECT_NEAR(28.5, 0.95 * 30, 1e-12);
  EXPECT_NEAR(divergence_upper(params, d), formula, 1e-9 * formula);
  // |V| = 2 and p_v = 1/2 make every ratio 1.
  EXPECT_EQ(divergence_upper({0.5, 0.5, 0.3}, dims(2, 2, 2)), 1.0);
}

TEST(DivergenceUpper, CoversSmallContextSets) {
  // A single context with p_v close to 1/|V|: the product formula alone
  // falls below the true constant, the log term does not.
  const InstanceParams params{1.0, 0.45, 0.1};
  PolicyTable p(2, 1, 2, {0.55, 0.45, 0.45, 0.55});
  const std::vector<double> px = {1.0};
  const auto m = divergence_exact(p, px);
  EXPECT_LE(m.max_entry(), divergence_upper(params, dims(1, 2, 2)));
}

TEST(DivergenceOrdering, RandomInstances) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 3);
    const int x = 1 + static_cast<int>(rng.uniform() * 5);
    const int v = 2 + static_cast<int>(rng.uniform() * 4);
    const InstanceParams params{0.5 / x, 0.5 / v, 0};
    const auto inst = generate_synthetic(dims(x, v, n), params, trial);
    const auto& ctx = inst.episodes[0].context_dist;
    const double p_min = *std::min_element(ctx.begin(), ctx.end());
    const auto lower = divergence_lower(
        inst.policies, ratio_tables(inst.policies, 0.0, params.p_v), 0.0,
        p_min);
    const auto exact = divergence_exact(inst.policies, ctx);
    const double upper = divergence_upper(params, inst.dims);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(lower(i, i), 1.0);
      EXPECT_EQ(exact(i, i), 1.0);
      for (int j = 0; j < n; ++j) {
        EXPECT_LE(lower(i, j), exact(i, j) + 1e-12);
        EXPECT_LE(exact(i, j), upper);
        EXPECT_NEAR(exact.divergence(i, j),
                    oracle::divergence(inst.policies, ctx, i, j), 1e-12);
      }
    }
  }
}

TEST(DivergenceTable, JsonDump) {
  PolicyTable p(2, 1, 2, {0.7, 0.3, 0.3, 0.7});
  auto m = divergence_exact(p, std::vector<double>{1.0});
  m.set_m_global(5.0);
  const auto j = m.to_json();
  EXPECT_EQ(j.at("m_global").get<double>(), 5.0);
  EXPECT_EQ(j.at("mode").get<std::string>(), "exact");
}

TEST(WInverse, FixedPointAndKnownValues) {
  const double two_over_e = 2.0 / std::exp(1.0);
  EXPECT_NEAR(w_inverse(two_over_e), two_over_e, 1e-12);
  EXPECT_NEAR(w_inverse(1.0 / std::log(2.0)), 1.0, 1e-12);
  const double big = w_inverse(1e6);
  EXPECT_GT(big, 1.99);
  EXPECT_LT(big, 2.0);
  EXPECT_EQ(w_inverse(0.0), 0.0);
  EXPECT_EQ(w_inverse(-1.0), 0.0);
}

TEST(WInverse, ForwardRoundTripOnLogGrid) {
  for (int k = 0; k < 100; ++k) {
    const double x = std::pow(10.0, -6.0 + 12.0 * k / 99.0);
    const double y = w_inverse(x);
    EXPECT_GT(y, 0.0);
    EXPECT_LT(y, 2.0);
    EXPECT_NEAR(w_forward(y) / x, 1.0, 1e-9) << "x = " << x;
    EXPECT_NEAR(y, oracle::w(x), 1e-12 * std::max(1.0, y));
  }
}

TEST(WInverse, ForwardIsIncreasing) {
  double prev = 0.0;
  for (int k = 1; k < 2000; ++k) {
    const double y = 2.0 * k / 2000.0;
    const double g = w_forward(y);
    EXPECT_GT(g, prev);
    prev = g;
  }
}

}  // namespace
}  // namespace edbandit
