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

#include "edbandit/rng.h"

#include <cmath>
#include <vector>

namespace edbandit {

Rng::Rng(std::uint64_t seed) : engine_() {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

Rng Rng::stream(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> halves;
  halves.reserve(2 * words.size());
  for (std::uint64_t w : words) {
    halves.push_back(static_cast<std::uint32_t>(w));
    halves.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(halves.begin(), halves.end());
  return Rng(seq);
}

double Rng::exponential() { return -std::log1p(-uniform()); }

int Rng::categorical(std::span<const double> probs) {
  const double u = uniform();
  double acc = 0.0;
  const int last = static_cast<int>(probs.size()) - 1;
  for (int k = 0; k < last; ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  return last;
}

}  // namespace edbandit
