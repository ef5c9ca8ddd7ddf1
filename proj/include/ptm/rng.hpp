// Copyright 2026 The poisson-transport Authors
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

#ifndef PTM_RNG_HPP_
#define PTM_RNG_HPP_

#include <cstdint>

namespace ptm {

// Deterministic counter-based generator (SplitMix64 output function).
//
// Every simulation replication draws from its own substream keyed by
// (master seed, stream index), so results are reproducible bit-for-bit
// regardless of thread count or platform.  std:: distributions are avoided on
// purpose: their variate sequences are implementation defined.
class Rng {
 public:
  // Substream `stream` of master seed `seed`.  Rng(seed) is stream 0.
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double next_double();

  // Uniform on [lo, hi); requires lo < hi, both finite.
  double next_uniform(double lo, double hi);

  // Poisson variate by CDF-inversion walk.  Means above 500 are split into
  // independent summands (Poisson additivity) to keep the walk short and the
  // inversion numerically sound.  Requires mean >= 0 and finite.
  long next_poisson(double mean);

 private:
  long poisson_inversion(double mean);

  std::uint64_t state_;
};

}  // namespace ptm

#endif  // PTM_RNG_HPP_
