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

#include "ptm/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "ptm/numerics.hpp"

namespace ptm {
namespace {

// Time buckets: kBuckets spans [0, T]; bucket kBuckets is exactly t = T.
constexpr std::int64_t kBuckets = 1000000000;
constexpr long kMaxSupportTop = 16383;  // k packs into 14 bits of the cache key
constexpr std::size_t kMaxCacheEntries = 1u << 22;

}  // namespace

double log_apply_semigroup(const LogConcaveFn& f, double s, long k) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("apply_semigroup: s must be finite and >= 0");
  }
  if (k < 0) throw std::invalid_argument("apply_semigroup: k must be >= 0");
  if (k > f.top()) return kNegInf;
  if (s == 0.0) return f.log_value(k);
  const long m = f.top() - k;
  static thread_local std::vector<double> terms;
  terms.resize(static_cast<std::size_t>(m) + 1);
  const double log_s = std::log(s);
  for (long n = 0; n <= m; ++n) {
    terms[static_cast<std::size_t>(n)] =
        f.log_value(k + n) + static_cast<double>(n) * log_s - s - log_factorial(n);
  }
  return log_sum_exp(terms);
}

double apply_semigroup(const LogConcaveFn& f, double s, long k) {
  if (s == 0.0 && k >= 0 && k <= f.top()) return f.value(k);  // exact identity
  return std::exp(log_apply_semigroup(f, s, k));
}

SemigroupEvaluator::SemigroupEvaluator(LogConcaveFn f, double horizon)
    : f_(std::move(f)), horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw std::invalid_argument("SemigroupEvaluator: horizon must be finite and > 0");
  }
  if (f_.top() > kMaxSupportTop) {
    throw std::invalid_argument("SemigroupEvaluator: support top exceeds " +
                                std::to_string(kMaxSupportTop));
  }
}

std::int64_t SemigroupEvaluator::bucket_of(double t) const {
  if (!std::isfinite(t)) {
    throw std::invalid_argument("SemigroupEvaluator: process time must be finite");
  }
  const double slack = 1e-9 * horizon_;
  if (t < -slack || t > horizon_ + slack) {
    throw std::invalid_argument("SemigroupEvaluator: process time outside [0, T]");
  }
  std::int64_t b = std::llround(t / horizon_ * static_cast<double>(kBuckets));
  if (b < 0) b = 0;
  if (b > kBuckets) b = kBuckets;
  return b;
}

double SemigroupEvaluator::bucket_time(std::int64_t b) const {
  if (b <= 0) return 0.0;
  if (b >= kBuckets) return horizon_;
  return horizon_ * (static_cast<double>(b) / static_cast<double>(kBuckets));
}

double SemigroupEvaluator::cached_log_value(std::int64_t b, long k) const {
  if (k < 0) throw std::invalid_argument("SemigroupEvaluator: k must be >= 0");
  if (k > f_.top()) return kNegInf;
  if (b >= kBuckets) return f_.log_value(k);  // s = 0: exact, no cache needed
  const std::uint64_t key =
      static_cast<std::uint64_t>(b) * static_cast<std::uint64_t>(kMaxSupportTop + 1) +
      static_cast<std::uint64_t>(k);
  {
    std::shared_lock<std::shared_mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  // Compute from the bucket time, never the raw query time: recomputation is
  // then idempotent and concurrent inserters agree on the value.
  const double s = horizon_ - bucket_time(b);
  const double val = log_apply_semigroup(f_, s > 0.0 ? s : 0.0, k);
  {
    std::unique_lock<std::shared_mutex> lock(mutex_);
    if (cache_.size() < kMaxCacheEntries) {
      return cache_.emplace(key, val).first->second;
    }
  }
  return val;
}

double SemigroupEvaluator::log_value(double t, long k) const {
  return cached_log_value(bucket_of(t), k);
}

double SemigroupEvaluator::value(double t, long k) const {
  const std::int64_t b = bucket_of(t);
  if (k >= 0 && k <= f_.top() && b >= kBuckets) return f_.value(k);  // P_0 f = f
  const double lv = cached_log_value(b, k);
  return lv == kNegInf ? 0.0 : std::exp(lv);
}

double SemigroupEvaluator::log_ratio(double t, long k) const {
  const std::int64_t b = bucket_of(t);
  if (k < 0) throw std::invalid_argument("SemigroupEvaluator: k must be >= 0");
  if (k + 1 > f_.top()) return kNegInf;
  return cached_log_value(b, k + 1) - cached_log_value(b, k);
}

double SemigroupEvaluator::intensity(double t, long k) const {
  const double lr = log_ratio(t, k);
  return lr == kNegInf ? 0.0 : std::exp(lr);
}

std::size_t SemigroupEvaluator::cache_size() const {
  std::shared_lock<std::shared_mutex> lock(mutex_);
  return cache_.size();
}

double pde_residual(const LogConcaveFn& f, double t, long k, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("pde_residual: h must be finite and > 0");
  }
  if (!(t - h >= 0.0)) {
    throw std::invalid_argument("pde_residual: need t - h >= 0");
  }
  const double derivative = (apply_semigroup(f, t + h, k) - apply_semigroup(f, t - h, k)) / (2.0 * h);
  const double drift = apply_semigroup(f, t, k + 1) - apply_semigroup(f, t, k);
  return std::abs(derivative - drift);
}

CheckReport check_ratio_monotone(const SemigroupEvaluator& ev, long k,
                                 std::span<const double> grid, double tol) {
  if (grid.size() < 2) {
    throw std::invalid_argument("check_ratio_monotone: need at least 2 grid times");
  }
  CheckReport report;
  report.worst_slack = 0.0;
  double prev = ev.intensity(grid[0], k);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] >= grid[i - 1])) {
      throw std::invalid_argument("check_ratio_monotone: grid must be ascending");
    }
    const double cur = ev.intensity(grid[i], k);
    const double scale = std::max(cur, prev);
    if (scale > 0.0) {
      const double rel_slack = (cur - prev) / scale;
      if (rel_slack < report.worst_slack) report.worst_slack = rel_slack;
      if (rel_slack < -tol && report.passed) {
        report.passed = false;
        report.first_violation = static_cast<long>(i);
      }
    }
    prev = cur;
  }
  return report;
}

CheckReport check_lc_preserved(const LogConcaveFn& f, double s, double tol) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("check_lc_preserved: s must be finite and >= 0");
  }
  CheckReport report;
  report.worst_slack = 0.0;
  std::vector<double> lv(static_cast<std::size_t>(f.top()) + 1);
  for (long k = 0; k <= f.top(); ++k) {
    lv[static_cast<std::size_t>(k)] = log_apply_semigroup(f, s, k);
  }
  for (long k = 1; k + 1 <= f.top(); ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    const double slack = 2.0 * lv[i] - lv[i - 1] - lv[i + 1];
    if (slack < report.worst_slack) report.worst_slack = slack;
    if (slack < -tol && report.passed) {
      report.passed = false;
      report.first_violation = k;
    }
  }
  return report;
}

std::vector<double> marginal_closed_form(const SemigroupEvaluator& ev, double t, long cap) {
  if (cap < 0) throw std::invalid_argument("marginal_closed_form: cap must be >= 0");
  std::vector<double> row(static_cast<std::size_t>(cap) + 1, 0.0);
  if (t == 0.0) {
    row[0] = 1.0;
    return row;
  }
  const long kmax = std::min(cap, ev.support_top());
  for (long k = 0; k <= kmax; ++k) {
    row[static_cast<std::size_t>(k)] = ev.value(t, k) * poisson_pmf(t, k);
  }
  return row;
}

MarginalCurve fokker_planck_evolve(const SemigroupEvaluator& ev,
                                   std::span<const double> times, long cap,
                                   double step_factor) {
  if (times.size() < 2) {
    throw std::invalid_argument("fokker_planck_evolve: need at least 2 grid times");
  }
  if (times[0] != 0.0) {
    throw std::invalid_argument("fokker_planck_evolve: grid must start at 0");
  }
  const double horizon = ev.horizon();
  if (std::abs(times[times.size() - 1] - horizon) > 1e-9 * horizon) {
    throw std::invalid_argument("fokker_planck_evolve: grid must end at the horizon");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("fokker_planck_evolve: grid must be strictly ascending");
    }
  }
  if (cap < 1) throw std::invalid_argument("fokker_planck_evolve: cap must be >= 1");
  if (!(step_factor > 0.0) || step_factor > 1.0) {
    throw std::invalid_argument("fokker_planck_evolve: step_factor must lie in (0, 1]");
  }

  const std::size_t dim = static_cast<std::size_t>(cap) + 1;
  std::vector<double> state(dim, 0.0);
  state[0] = 1.0;

  // Upward drift with zero flux out of `cap`: out[k] = a(k-1) m(k-1) - a(k) m(k),
  // which telescopes to an exactly conserved total.
  auto rhs = [&](double t, const std::vector<double>& m, std::vector<double>& out) {
    double inflow = 0.0;
    for (long k = 0; k <= cap; ++k) {
      const std::size_t i = static_cast<std::size_t>(k);
      const double outflow = k < cap ? ev.intensity(t, k) * m[i] : 0.0;
      out[i] = inflow - outflow;
      inflow = outflow;
    }
  };

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), scratch(dim);
  MarginalCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.rows.reserve(times.size());
  curve.rows.push_back(state);

  const double base_step = step_factor * horizon;
  for (std::size_t seg = 1; seg < times.size(); ++seg) {
    const double t0 = times[seg - 1];
    const double t1 = times[seg];
    const double span = t1 - t0;
    long nsteps = std::lround(span / base_step);
    if (nsteps < 1) nsteps = 1;
    const double h = span / static_cast<double>(nsteps);
    for (long step = 0; step < nsteps; ++step) {
      const double t = t0 + static_cast<double>(step) * h;
      rhs(t, state, k1);
      for (std::size_t i = 0; i < dim; ++i) scratch[i] = state[i] + 0.5 * h * k1[i];
      rhs(t + 0.5 * h, scratch, k2);
      for (std::size_t i = 0; i < dim; ++i) scratch[i] = state[i] + 0.5 * h * k2[i];
      rhs(t + 0.5 * h, scratch, k3);
      for (std::size_t i = 0; i < dim; ++i) scratch[i] = state[i] + h * k3[i];
      rhs(t + h, scratch, k4);
      for (std::size_t i = 0; i < dim; ++i) {
        state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    double mass = kahan_total(state);
    if (std::abs(mass - 1.0) > 1e-8) {
      throw std::runtime_error("fokker_planck_evolve: mass drifted to " +
                               std::to_string(mass) + " at t=" + std::to_string(t1));
    }
    curve.rows.push_back(state);
  }
  return curve;
}

FokkerPlanckReport fokker_planck_compare(const UlcMeasure& target, long grid_points,
                                         double tolerance) {
  if (grid_points < 2) {
    throw std::invalid_argument("fokker_planck_compare: need at least 2 grid points");
  }
  SemigroupEvaluator ev(target.density(), target.horizon());
  const double horizon = target.horizon();
  std::vector<double> times(static_cast<std::size_t>(grid_points));
  for (long i = 0; i < grid_points; ++i) {
    times[static_cast<std::size_t>(i)] =
        horizon * static_cast<double>(i) / static_cast<double>(grid_points - 1);
  }
  times.back() = horizon;
  const long cap = target.support_top() + 5;
  MarginalCurve curve = fokker_planck_evolve(ev, times, cap);

  FokkerPlanckReport report;
  report.times = curve.times;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    const std::vector<double> closed = marginal_closed_form(ev, curve.times[i], cap);
    double sup = 0.0;
    for (std::size_t k = 0; k < closed.size(); ++k) {
      sup = std::max(sup, std::abs(curve.rows[i][k] - closed[k]));
    }
    report.sup_errors.push_back(sup);
    report.max_error = std::max(report.max_error, sup);
  }
  report.passed = report.max_error <= tolerance;
  return report;
}

double intensity_time_integral(const SemigroupEvaluator& ev, long k, long panels) {
  if (panels < 2 || panels % 2 != 0) {
    throw std::invalid_argument("intensity_time_integral: panels must be even and >= 2");
  }
  const double horizon = ev.horizon();
  const double h = horizon / static_cast<double>(panels);
  KahanSum acc;
  acc.add(ev.intensity(0.0, k));
  acc.add(ev.intensity(horizon, k));
  for (long i = 1; i < panels; ++i) {
    const double t = horizon * static_cast<double>(i) / static_cast<double>(panels);
    acc.add((i % 2 == 1 ? 4.0 : 2.0) * ev.intensity(t, k));
  }
  return acc.value() * h / 3.0;
}

}  // namespace ptm
