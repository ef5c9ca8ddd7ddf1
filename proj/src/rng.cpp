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

#include "ptm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ptm {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer: bijective avalanche mix.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  // Decorrelate (seed, stream) pairs by finalizing each key separately before
  // combining; adjacent streams of one seed share no low-entropy structure.
  state_ = mix(mix(seed + kGamma) ^ mix(stream * kGamma + 0x2545f4914f6cdd1dULL));
}

std::uint64_t Rng::next_u64() {
  state_ += kGamma;
  return mix(state_);
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("next_uniform: need finite lo < hi");
  }
  return lo + (hi - lo) * next_double();
}

long Rng::next_poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("next_poisson: mean must be finite and >= 0");
  }
  long total = 0;
  while (mean > 500.0) {
    total += poisson_inversion(500.0);
    mean -= 500.0;
  }
  if (mean > 0.0) total += poisson_inversion(mean);
  return total;
}

long Rng::poisson_inversion(double mean) {
  const double u = next_double();
  double p = std::exp(-mean);
  double cdf = p;
  long k = 0;
  // Walk cap: far beyond any mass the CDF walk can miss for mean <= 500; the
  // guard only matters if u lands in the rounded-away tail.
  const long cap = static_cast<long>(mean + 60.0 * std::sqrt(mean + 1.0) + 100.0);
  while (u > cdf && k < cap) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace ptm
