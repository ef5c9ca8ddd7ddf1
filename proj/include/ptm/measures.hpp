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

#ifndef PTM_MEASURES_HPP_
#define PTM_MEASURES_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptm {

// Thrown by file I/O helpers so callers can distinguish "bad path" from
// "bad content" (the latter raises std::invalid_argument).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Outcome of a structural validity scan (log-concavity, ultra-log-concavity).
// `worst_slack` is the most negative relative slack seen (log-domain for the
// log-concavity check, (lhs-rhs)/max(lhs,rhs) for the ULC check; the two
// scales agree to second order); a passing report still carries it as a
// margin diagnostic.
struct CheckReport {
  bool passed = true;
  long first_violation = -1;  // smallest violating index, -1 when none
  double worst_slack = 0.0;
};

// One evaluated inequality lhs <= rhs (+ tolerance).  Identities are encoded
// with lhs = |difference|, rhs = 0 and the allowance in `tolerance`.  `passed`
// is always evaluated; `asserted` distinguishes load-bearing claims from
// diagnostics that are only reported.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;   // the comparison constant baked into rhs (0 if n/a)
  double slack = 0.0;      // rhs - lhs
  double tolerance = 0.0;  // absolute allowance applied to `passed`
  bool asserted = true;
  bool passed = true;
};

// Standard report: passed iff slack >= -tol_rel * max(|lhs|, |rhs|, 1).
InequalityReport make_inequality_report(std::string name, double lhs, double rhs,
                                        double constant, double tol_rel,
                                        bool asserted = true);

// log(n!) from a precomputed table (single lgamma pass at startup; no shared
// libm state touched on the hot path).
double log_factorial(long n);

// Poisson(rate) probability mass at k, evaluated in log space.
// Requires rate > 0 finite, k >= 0.
double poisson_log_pmf(double rate, long k);
double poisson_pmf(double rate, long k);

// A positive function on {0, ..., top} with finite support, stored with both
// linear and log values so downstream code can pick the stable representation.
// Values beyond `top` are implicitly zero (log value -inf).
class LogConcaveFn {
 public:
  // Requires nonempty, all entries finite and > 0.
  explicit LogConcaveFn(std::vector<double> values);

  // Exact-log construction: entries finite (the linear values are exp(lv)).
  static LogConcaveFn from_log_values(std::vector<double> log_values);

  long top() const { return static_cast<long>(values_.size()) - 1; }
  double value(long k) const;      // 0 outside {0..top}
  double log_value(long k) const;  // -inf outside {0..top}
  std::span<const double> values() const { return values_; }
  std::span<const double> log_values() const { return log_values_; }

 private:
  LogConcaveFn() = default;
  std::vector<double> values_;
  std::vector<double> log_values_;
};

// Checks f(k)^2 >= f(k-1) f(k+1) for all interior k, equivalently concavity of
// log f.  Runs in log domain: absolute slack tol on logs equals relative slack
// on the products, and cannot overflow.  No "+1" floor: the check must stay
// scale invariant (f and c*f pass or fail together).
CheckReport check_log_concave(std::span<const double> values, double tol = 1e-12);
CheckReport check_log_concave(const LogConcaveFn& f, double tol = 1e-12);

// A probability vector on {0, ..., size-1}: entries >= 0 summing to 1 within
// 1e-12, with a contiguous support interval [support_min, support_max]
// (no interior zeros).
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> weights);

  static ProbabilityVector delta(long k);

  long size() const { return static_cast<long>(weights_.size()); }
  double weight(long k) const;  // 0 outside the stored range
  std::span<const double> weights() const { return weights_; }
  long support_min() const { return support_min_; }
  long support_max() const { return support_max_; }

  double mean() const;
  double variance() const;

 private:
  std::vector<double> weights_;
  long support_min_ = 0;
  long support_max_ = 0;
};

// Ultra-log-concavity: mu(k)^2 >= ((k+1)/k) mu(k+1) mu(k-1) for k >= 1.
// Relative slack tol * max(lhs, rhs); no "+1" floor (scale invariance).
CheckReport check_ulc(std::span<const double> weights, double tol = 1e-12);
CheckReport check_ulc(const ProbabilityVector& mu, double tol = 1e-12);

// An ultra-log-concave probability measure mu on {0..top} bundled with its
// representation mu(k) = f(k) * poisson_pmf(horizon, k) where f is
// log-concave, f normalized so that sum_k f(k) poisson_pmf(horizon, k) = 1.
// The support must contain 0 (f(0) > 0), which makes the acceptance-rate
// ceiling intensity_bound() = f(1)/f(0) well defined.
class UlcMeasure {
 public:
  // Normalizes f against Poisson(horizon) weights.  Requires horizon > 0 and
  // check_log_concave(f) to pass.
  static UlcMeasure from_density(const LogConcaveFn& f, double horizon);

  // Requires weights to pass check_ulc, support to start at 0, sum 1 (within
  // the ProbabilityVector tolerance).
  static UlcMeasure from_weights(std::vector<double> weights, double horizon);

  // Poisson(horizon) truncated where the tail mass drops below 1e-14; its
  // density f is identically 1 on the retained range.
  static UlcMeasure poisson(double horizon);

  // Binomial(n, p) with horizon 1; requires n >= 1, 0 < p < 1.
  static UlcMeasure binomial(long n, double p);

  // Bernoulli(p) with horizon 1; requires 0 <= p < 1.
  static UlcMeasure bernoulli(double p);

  const ProbabilityVector& pv() const { return pv_; }
  const LogConcaveFn& density() const { return f_; }
  double horizon() const { return horizon_; }
  long support_top() const { return f_.top(); }
  double weight(long k) const { return pv_.weight(k); }

  // f(1)/f(0): the ceiling of the transport acceptance intensity.  Zero for a
  // point mass at 0.
  double intensity_bound() const;

  // Text form: "T=<horizon>" then one "<k> <weight>" line per support point,
  // weights printed with 17 significant digits (round-trip exact).
  std::string serialize() const;
  static UlcMeasure parse(const std::string& text);
  static UlcMeasure read_file(const std::string& path);
  void write_file(const std::string& path) const;

 private:
  UlcMeasure(ProbabilityVector pv, LogConcaveFn f, double horizon)
      : pv_(std::move(pv)), f_(std::move(f)), horizon_(horizon) {}

  ProbabilityVector pv_;
  LogConcaveFn f_;
  double horizon_;
};

// sum_k phi(g(k)) mu(k) - phi(sum_k g(k) mu(k)).  Every used g(k) and the mean
// must lie in [domain_lo, domain_hi]; otherwise std::domain_error.  g must
// cover the support of mu.
double phi_entropy(const ProbabilityVector& mu, std::span<const double> g,
                   const std::function<double(double)>& phi, double domain_lo,
                   double domain_hi);

// Entropy functional for phi(u) = u log u with the 0*log(0) = 0 convention;
// requires g >= 0 on the support.
double entropy(const ProbabilityVector& mu, std::span<const double> g);

// Relative entropy H(nu | mu) = sum nu log(nu/mu).  std::domain_error when nu
// puts mass where mu does not.
double relative_entropy(const ProbabilityVector& nu, const ProbabilityVector& mu);

// Order-1 Wasserstein distance on the integers: sum_k |F_nu(k) - F_mu(k)|.
double wasserstein1(const ProbabilityVector& nu, const ProbabilityVector& mu);

// c * ((1 + r/c) log(1 + r/c) - r/c) for c > 0, r >= 0, via log1p.
double alpha(double c, double r);

// Bregman gap of u log u between u+v and u:
// (u+v) log(u+v) - u log u - (log u + 1) v, computed as
// (u+v) log1p(v/u) - v for stability near v = 0.
// Requires u > 0 and u + v > 0.
double psi(double u, double v);

// Distribution of the sum of independent draws: full discrete convolution.
ProbabilityVector convolve(const ProbabilityVector& a, const ProbabilityVector& b);

}  // namespace ptm

#endif  // PTM_MEASURES_HPP_
