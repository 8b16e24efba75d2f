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

#include "edbandit/divergence.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edbandit {

double f1(double x) { return x * std::exp(x - 1.0) - 1.0; }

RatioTables::RatioTables(int num_experts, int num_contexts, int num_actions)
    : num_experts_(num_experts),
      num_contexts_(num_contexts),
      num_actions_(num_actions) {
  const std::size_t n = static_cast<std::size_t>(num_experts) * num_experts *
                        num_contexts * num_actions;
  hat_.assign(n, 0.0);
  lo_.assign(n, 0.0);
  hi_.assign(n, 0.0);
}

double ratio_sandwich_width(double xi, double p_v) {
  return xi / (p_v * (p_v - xi)) + xi / (p_v * (p_v + xi));
}

RatioTables ratio_tables(const PolicyTable& policies, double xi, double p_v) {
  if (!(xi >= 0.0) || !(xi < p_v)) {
    throw std::invalid_argument("ratio_tables: need 0 <= xi < p_v");
  }
  if (!(policies.min_entry() > 0.0)) {
    throw std::invalid_argument("ratio_tables: policy entries must be > 0");
  }
  const int n = policies.num_experts();
  const int nx = policies.num_contexts();
  const int nv = policies.num_actions();
  RatioTables t(n, nx, nv);
  const double down = xi / (p_v * (p_v - xi));
  const double up = xi / (p_v * (p_v + xi));
  t.kappa_ = down + up;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int x = 0; x < nx; ++x) {
        for (int v = 0; v < nv; ++v) {
          const double r =
              i == j ? 1.0 : policies(i, x, v) / policies(j, x, v);
          const std::size_t k = t.index(i, j, x, v);
          t.hat_[k] = r;
          t.lo_[k] = r - down;
          t.hi_[k] = r + up;
        }
      }
    }
  }
  return t;
}

DivergenceTable::DivergenceTable(int num_experts, DivergenceMode mode)
    : num_experts_(num_experts),
      mode_(mode),
      m_(static_cast<std::size_t>(num_experts) * num_experts, 1.0),
      d_(static_cast<std::size_t>(num_experts) * num_experts, 0.0) {}

double DivergenceTable::max_entry() const {
  return m_.empty() ? 1.0 : *std::max_element(m_.begin(), m_.end());
}

nlohmann::json DivergenceTable::to_json() const {
  nlohmann::json m = nlohmann::json::array();
  nlohmann::json d = nlohmann::json::array();
  for (int i = 0; i < num_experts_; ++i) {
    std::vector<double> mrow, drow;
    for (int j = 0; j < num_experts_; ++j) {
      mrow.push_back((*this)(i, j));
      drow.push_back(divergence(i, j));
    }
    m.push_back(mrow);
    d.push_back(drow);
  }
  return {{"mode", mode_ == DivergenceMode::kExact ? "exact" : "estimated"},
          {"m", m},
          {"d", d},
          {"m_global", m_global_}};
}

DivergenceTable divergence_lower(const PolicyTable& approx,
                                 const RatioTables& ratios, double xi,
                                 double p_x) {
  const int n = approx.num_experts();
  if (ratios.num_experts() != n || ratios.num_contexts() != approx.num_contexts() ||
      ratios.num_actions() != approx.num_actions()) {
    throw std::invalid_argument("divergence_lower: table shapes disagree");
  }
  DivergenceTable t(n, DivergenceMode::kEstimated);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double sum = 0.0;
      for (int x = 0; x < approx.num_contexts(); ++x) {
        for (int v = 0; v < approx.num_actions(); ++v) {
          sum += (approx(i, x, v) - xi) * f1(ratios.lo(i, j, x, v));
        }
      }
      const double d = std::max(0.0, p_x * sum);
      t.d_[t.index(i, j)] = d;
      t.m_[t.index(i, j)] = 1.0 + std::log1p(d);
    }
  }
  t.m_global_ = t.max_entry();
  return t;
}

DivergenceTable divergence_exact(const PolicyTable& pol,
                                 std::span<const double> context_dist) {
  const int n = pol.num_experts();
  if (static_cast<int>(context_dist.size()) != pol.num_contexts()) {
    throw std::invalid_argument("divergence_exact: context size mismatch");
  }
  DivergenceTable t(n, DivergenceMode::kExact);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d = 0.0;
      if (i != j) {
        for (int x = 0; x < pol.num_contexts(); ++x) {
          double inner = 0.0;
          for (int v = 0; v < pol.num_actions(); ++v) {
            inner += pol(i, x, v) * f1(pol(i, x, v) / pol(j, x, v));
          }
          d += context_dist[x] * inner;
        }
      }
      t.d_[t.index(i, j)] = d;
      t.m_[t.index(i, j)] = 1.0 + std::log1p(d);
    }
  }
  t.m_global_ = t.max_entry();
  return t;
}

double divergence_upper(const InstanceParams& params, const ProblemDims& dims) {
  const double f = f1((1.0 - params.p_v) / params.p_v);
  const double scaled =
      (1.0 - params.p_x) * dims.num_contexts * dims.num_actions * f;
  return std::max(1.0 + std::log1p(std::max(0.0, f)), scaled);
}

double w_forward(double y) {
  // log(2 / y) = -log1p(-(2 - y) / 2); 2 - y is exact for y in [1, 2].
  return y / -std::log1p(-(2.0 - y) / 2.0);
}

double w_inverse(double x) {
  if (!(x > 0.0)) return 0.0;
  constexpr double kUpper = 2.0 - 1e-15;
  double lo = 0.0;
  double hi = kUpper;
  if (w_forward(hi) <= x) return hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (w_forward(mid) < x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(w_forward(lo) - x) < std::abs(w_forward(hi) - x) ? lo : hi;
}

}  // namespace edbandit
