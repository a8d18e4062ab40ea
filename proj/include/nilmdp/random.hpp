// Copyright 2026 The nilm-dp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NILMDP_RANDOM_HPP_
#define NILMDP_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace nilmdp {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive mix of a seed with stream identifiers.
inline std::uint64_t hash64(std::uint64_t seed,
                            std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t id : ids) h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

inline std::uint64_t hash64(std::uint64_t seed, std::uint64_t id) {
  return hash64(seed, {id});
}

// Maps 64 random bits to [0, 1) with 53-bit resolution.
inline double bits_to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential stream used by rounding and synthesis. Uniforms are derived from
// raw engine output so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform() { return bits_to_unit(engine_()); }
  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; one value per call keeps the stream position predictable.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// Counter-based uniforms: draw k of index i is a pure function of
// (seed, i, k), so any draw can be recomputed without replaying a stream.
class IndexedUniforms {
 public:
  IndexedUniforms(std::uint64_t seed, std::uint64_t index)
      : state_(hash64(seed, index)) {}

  double next() {
    state_ = splitmix64(state_);
    return bits_to_unit(state_);
  }
  // Uniform on (0, 1]; safe under log().
  double next_open_low() { return 1.0 - next(); }

 private:
  std::uint64_t state_;
};

}  // namespace nilmdp

#endif  // NILMDP_RANDOM_HPP_
