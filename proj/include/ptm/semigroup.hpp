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

#ifndef PTM_SEMIGROUP_HPP_
#define PTM_SEMIGROUP_HPP_

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ptm/measures.hpp"

namespace ptm {

// P_s f(k) = sum_n f(k+n) poisson_pmf(s, n): the Poisson smoothing semigroup.
// For finitely supported f this is an exact finite sum, evaluated in log space
// (log-sum-exp).  s = 0 returns f(k) exactly.  Requires s >= 0.
double apply_semigroup(const LogConcaveFn& f, double s, long k);
double log_apply_semigroup(const LogConcaveFn& f, double s, long k);

// Memoizing evaluator for one target density over process times t in [0, T]
// (semigroup time s = T - t).  Times are quantized to buckets of width
// 1e-9 * T; a cached value is always computed *from* the bucket time, so the
// first writer and any later recomputation agree bit for bit, and lookups that
// race produce identical doubles no matter which thread wins.  Thread safe.
class SemigroupEvaluator {
 public:
  SemigroupEvaluator(LogConcaveFn f, double horizon);

  double horizon() const { return horizon_; }
  long support_top() const { return f_.top(); }
  const LogConcaveFn& density() const { return f_; }

  // log P_{T-t} f(k); -inf for k beyond the support top.
  double log_value(double t, long k) const;
  double value(double t, long k) const;

  // Discrete log-gradient of the interpolation potential:
  // log P_{T-t} f(k+1) - log P_{T-t} f(k); -inf when k+1 exceeds the top.
  double log_ratio(double t, long k) const;

  // exp(log_ratio): the transport acceptance intensity at (t, k); 0 at the
  // support top.  Non-increasing in k and always <= intensity_bound of the
  // target.
  double intensity(double t, long k) const;

  std::size_t cache_size() const;

 private:
  std::int64_t bucket_of(double t) const;
  double bucket_time(std::int64_t b) const;
  double cached_log_value(std::int64_t b, long k) const;

  LogConcaveFn f_;
  double horizon_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint64_t, double> cache_;
};

// |d/dt P_{t} f(k) - (P_t f(k+1) - P_t f(k))| with a centered difference of
// half-width h.  Requires t - h >= 0 and h > 0.  Second-order accurate: the
// residual shrinks ~4x when h is halved (until rounding noise).
double pde_residual(const LogConcaveFn& f, double t, long k, double h);

// The acceptance intensity t -> exp(log_ratio(t, k)) must be non-decreasing
// over any increasing grid of process times.  Relative slack tol.
CheckReport check_ratio_monotone(const SemigroupEvaluator& ev, long k,
                                 std::span<const double> grid, double tol = 1e-12);

// P_t f must remain log-concave for every t >= 0 (smoothing preserves the
// class).  Checked on the full support at semigroup time s.
CheckReport check_lc_preserved(const LogConcaveFn& f, double s, double tol = 1e-12);

// Closed-form law of the transport process at process time t:
// row(k) = P_{T-t} f(k) * poisson_pmf(t, k) for t > 0, delta_0 at t = 0.
std::vector<double> marginal_closed_form(const SemigroupEvaluator& ev, double t, long cap);

// Forward-equation evolution of the time marginals from delta_0: RK4 with
// fixed step step_factor * horizon, sub-stepped so each grid time is hit
// exactly.  States live on {0..cap}; the generator moves mass only upward and
// the flux out of `cap` is zero, so total mass is conserved exactly.
// `times` must be ascending, start at 0 and end at the horizon.
struct MarginalCurve {
  std::vector<double> times;
  std::vector<std::vector<double>> rows;  // rows[i][k], each sums to 1 (1e-8)
};

MarginalCurve fokker_planck_evolve(const SemigroupEvaluator& ev,
                                   std::span<const double> times, long cap,
                                   double step_factor = 1e-3);

// Evolves on a uniform grid of `grid_points` times spanning [0, T] and
// compares each row to the closed form in sup norm.
struct FokkerPlanckReport {
  std::vector<double> times;
  std::vector<double> sup_errors;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

FokkerPlanckReport fokker_planck_compare(const UlcMeasure& target, long grid_points = 21,
                                         double tolerance = 1e-6);

// Simpson integral of t -> intensity(t, k) over [0, T] with `panels` panels
// (panels must be even and >= 2).
double intensity_time_integral(const SemigroupEvaluator& ev, long k, long panels = 4096);

}  // namespace ptm

#endif  // PTM_SEMIGROUP_HPP_
