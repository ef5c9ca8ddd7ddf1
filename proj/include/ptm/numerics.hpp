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

#ifndef PTM_NUMERICS_HPP_
#define PTM_NUMERICS_HPP_

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace ptm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum(exp(v))) with the usual max shift; -inf entries are transparent.
// Returns -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> v) {
  double best = kNegInf;
  for (double x : v) {
    if (x > best) best = x;
  }
  if (best == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : v) {
    if (x != kNegInf) acc += std::exp(x - best);
  }
  return best + std::log(acc);
}

// Compensated (Kahan) accumulator: fixed-order summation whose result is
// insensitive to benign rounding drift when the same order is replayed.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double kahan_total(std::span<const double> v) {
  KahanSum s;
  for (double x : v) s.add(x);
  return s.value();
}

}  // namespace ptm

#endif  // PTM_NUMERICS_HPP_
