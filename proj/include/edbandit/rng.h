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

#ifndef EDBANDIT_RNG_H_
#define EDBANDIT_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace edbandit {

// Seedable random source used everywhere in the library.
//
// The engine is std::mt19937_64 (period 2^19937 - 1). A stream is identified
// by a list of 64-bit words, typically (base_seed, purpose, run, ...); each
// word is split into two 32-bit halves, low half first, and fed to
// std::seed_seq. Both seed_seq's mixing and the engine's seeding procedure
// are fixed by the C++ standard, so a given word list maps to the same
// sequence on every conforming platform. The variate transforms below are
// written out by hand for the same reason: the std:: distributions are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng stream(std::initializer_list<std::uint64_t> words);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard exponential variate.
  double exponential();

  // Index drawn from a probability vector by inverse CDF. The last index
  // absorbs any rounding slack in the tail.
  int categorical(std::span<const double> probs);

 private:
  explicit Rng(std::seed_seq& seq) : engine_(seq) {}
  std::mt19937_64 engine_;
};

// Stream purposes. Values are part of the stream derivation and must not be
// renumbered.
enum class StreamPurpose : std::uint64_t {
  kGenerator = 1,
  kBootstrap = 2,
  kEnvironment = 3,
  kIngest = 4,
};

}  // namespace edbandit

#endif  // EDBANDIT_RNG_H_
