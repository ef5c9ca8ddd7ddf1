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

#include "ptm/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ptm/numerics.hpp"

namespace ptm {
namespace {

constexpr long kLogFactorialTableSize = 4096;
constexpr double kMassTolerance = 1e-12;     // |sum - 1| allowed for a pv
constexpr double kPoissonTailCut = 1e-14;    // truncation tail for poisson()
constexpr long kPoissonSupportCap = 100000;  // sanity ceiling for truncation

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

InequalityReport make_inequality_report(std::string name, double lhs, double rhs,
                                        double constant, double tol_rel,
                                        bool asserted) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant = constant;
  r.slack = rhs - lhs;
  r.tolerance = tol_rel * std::max({std::abs(lhs), std::abs(rhs), 1.0});
  r.asserted = asserted;
  r.passed = r.slack >= -r.tolerance;
  return r;
}

double log_factorial(long n) {
  if (n < 0) throw std::invalid_argument("log_factorial: n must be >= 0");
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialTableSize);
    for (long i = 0; i < kLogFactorialTableSize; ++i) {
      t[static_cast<std::size_t>(i)] = std::lgamma(static_cast<double>(i) + 1.0);
    }
    return t;
  }();
  if (n < kLogFactorialTableSize) return table[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double poisson_log_pmf(double rate, long k) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("poisson_log_pmf: rate must be finite and > 0");
  }
  if (k < 0) throw std::invalid_argument("poisson_log_pmf: k must be >= 0");
  return static_cast<double>(k) * std::log(rate) - rate - log_factorial(k);
}

double poisson_pmf(double rate, long k) { return std::exp(poisson_log_pmf(rate, k)); }

LogConcaveFn::LogConcaveFn(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("LogConcaveFn: empty values");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("LogConcaveFn: stored values must be finite and > 0");
    }
  }
  log_values_.reserve(values.size());
  for (double v : values) log_values_.push_back(std::log(v));
  values_ = std::move(values);
}

LogConcaveFn LogConcaveFn::from_log_values(std::vector<double> log_values) {
  if (log_values.empty()) {
    throw std::invalid_argument("LogConcaveFn: empty log values");
  }
  for (double lv : log_values) {
    if (!std::isfinite(lv)) {
      throw std::invalid_argument("LogConcaveFn: log values must be finite");
    }
  }
  LogConcaveFn f;
  f.values_.reserve(log_values.size());
  for (double lv : log_values) f.values_.push_back(std::exp(lv));
  f.log_values_ = std::move(log_values);
  return f;
}

double LogConcaveFn::value(long k) const {
  if (k < 0 || k > top()) return 0.0;
  return values_[static_cast<std::size_t>(k)];
}

double LogConcaveFn::log_value(long k) const {
  if (k < 0 || k > top()) return kNegInf;
  return log_values_[static_cast<std::size_t>(k)];
}

namespace {

CheckReport check_log_concave_logs(std::span<const double> lv, double tol) {
  CheckReport report;
  report.worst_slack = 0.0;
  const long n = static_cast<long>(lv.size());
  for (long k = 1; k + 1 < n; ++k) {
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

}  // namespace

CheckReport check_log_concave(std::span<const double> values, double tol) {
  std::vector<double> lv;
  lv.reserve(values.size());
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("check_log_concave: values must be finite and > 0");
    }
    lv.push_back(std::log(v));
  }
  return check_log_concave_logs(lv, tol);
}

CheckReport check_log_concave(const LogConcaveFn& f, double tol) {
  return check_log_concave_logs(f.log_values(), tol);
}

ProbabilityVector::ProbabilityVector(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("ProbabilityVector: empty weights");
  KahanSum total;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("ProbabilityVector: weights must be finite and >= 0");
    }
    total.add(w);
  }
  if (std::abs(total.value() - 1.0) > kMassTolerance) {
    throw std::invalid_argument("ProbabilityVector: weights sum to " +
                                format_real(total.value()) + ", not 1 within 1e-12");
  }
  const long n = static_cast<long>(weights.size());
  long lo = -1;
  long hi = -1;
  for (long k = 0; k < n; ++k) {
    if (weights[static_cast<std::size_t>(k)] > 0.0) {
      if (lo < 0) lo = k;
      hi = k;
    }
  }
  if (lo < 0) throw std::invalid_argument("ProbabilityVector: no positive weight");
  for (long k = lo; k <= hi; ++k) {
    if (!(weights[static_cast<std::size_t>(k)] > 0.0)) {
      throw std::invalid_argument(
          "ProbabilityVector: support must be a contiguous integer interval");
    }
  }
  weights_ = std::move(weights);
  support_min_ = lo;
  support_max_ = hi;
}

ProbabilityVector ProbabilityVector::delta(long k) {
  if (k < 0) throw std::invalid_argument("delta: k must be >= 0");
  std::vector<double> w(static_cast<std::size_t>(k) + 1, 0.0);
  w.back() = 1.0;
  return ProbabilityVector(std::move(w));
}

double ProbabilityVector::weight(long k) const {
  if (k < 0 || k >= size()) return 0.0;
  return weights_[static_cast<std::size_t>(k)];
}

double ProbabilityVector::mean() const {
  KahanSum s;
  for (long k = support_min_; k <= support_max_; ++k) {
    s.add(static_cast<double>(k) * weights_[static_cast<std::size_t>(k)]);
  }
  return s.value();
}

double ProbabilityVector::variance() const {
  const double m = mean();
  KahanSum s;
  for (long k = support_min_; k <= support_max_; ++k) {
    const double d = static_cast<double>(k) - m;
    s.add(d * d * weights_[static_cast<std::size_t>(k)]);
  }
  return s.value();
}

CheckReport check_ulc(std::span<const double> weights, double tol) {
  CheckReport report;
  report.worst_slack = 0.0;
  const long n = static_cast<long>(weights.size());
  for (long k = 1; k + 1 < n; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    const double lhs = weights[i] * weights[i];
    const double rhs = (static_cast<double>(k + 1) / static_cast<double>(k)) *
                       weights[i + 1] * weights[i - 1];
    const double scale = std::max(lhs, rhs);
    if (scale <= 0.0) continue;  // vacuous: both sides zero
    const double rel_slack = (lhs - rhs) / scale;
    if (rel_slack < report.worst_slack) report.worst_slack = rel_slack;
    if (rel_slack < -tol && report.passed) {
      report.passed = false;
      report.first_violation = k;
    }
  }
  return report;
}

CheckReport check_ulc(const ProbabilityVector& mu, double tol) {
  return check_ulc(mu.weights(), tol);
}

UlcMeasure UlcMeasure::from_density(const LogConcaveFn& f, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("UlcMeasure: horizon must be finite and > 0");
  }
  const CheckReport lc = check_log_concave(f);
  if (!lc.passed) {
    throw std::invalid_argument("UlcMeasure: density is not log-concave (first failure at k=" +
                                std::to_string(lc.first_violation) + ")");
  }
  const long top = f.top();
  std::vector<double> terms(static_cast<std::size_t>(top) + 1);
  for (long k = 0; k <= top; ++k) {
    terms[static_cast<std::size_t>(k)] = f.log_value(k) + poisson_log_pmf(horizon, k);
  }
  const double log_z = log_sum_exp(terms);
  std::vector<double> log_f(static_cast<std::size_t>(top) + 1);
  std::vector<double> weights(static_cast<std::size_t>(top) + 1);
  for (long k = 0; k <= top; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    log_f[i] = f.log_value(k) - log_z;
    weights[i] = std::exp(terms[i] - log_z);
  }
  ProbabilityVector pv(std::move(weights));
  const CheckReport ulc = check_ulc(pv);
  if (!ulc.passed) {
    throw std::logic_error("UlcMeasure: normalized weights fail the ULC check (k=" +
                           std::to_string(ulc.first_violation) + ")");
  }
  return UlcMeasure(std::move(pv), LogConcaveFn::from_log_values(std::move(log_f)), horizon);
}

UlcMeasure UlcMeasure::from_weights(std::vector<double> weights, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("UlcMeasure: horizon must be finite and > 0");
  }
  ProbabilityVector pv(std::move(weights));
  if (pv.support_min() != 0) {
    throw std::invalid_argument("UlcMeasure: support must contain 0");
  }
  const CheckReport ulc = check_ulc(pv);
  if (!ulc.passed) {
    throw std::invalid_argument("UlcMeasure: weights are not ultra-log-concave (first failure at k=" +
                                std::to_string(ulc.first_violation) + ")");
  }
  const long top = pv.support_max();
  std::vector<double> log_f(static_cast<std::size_t>(top) + 1);
  for (long k = 0; k <= top; ++k) {
    log_f[static_cast<std::size_t>(k)] = std::log(pv.weight(k)) - poisson_log_pmf(horizon, k);
  }
  LogConcaveFn f = LogConcaveFn::from_log_values(std::move(log_f));
  const CheckReport lc = check_log_concave(f, 1e-9);
  if (!lc.passed) {
    throw std::logic_error("UlcMeasure: derived density is not log-concave (k=" +
                           std::to_string(lc.first_violation) + ")");
  }
  return UlcMeasure(std::move(pv), std::move(f), horizon);
}

UlcMeasure UlcMeasure::poisson(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("UlcMeasure: horizon must be finite and > 0");
  }
  KahanSum mass;
  long top = -1;
  for (long k = 0; k < kPoissonSupportCap; ++k) {
    mass.add(poisson_pmf(horizon, k));
    if (1.0 - mass.value() <= kPoissonTailCut && k >= 1) {
      top = k;
      break;
    }
  }
  if (top < 0) {
    throw std::invalid_argument("UlcMeasure: horizon too large to truncate");
  }
  std::vector<double> ones(static_cast<std::size_t>(top) + 1, 1.0);
  return from_density(LogConcaveFn(std::move(ones)), horizon);
}

UlcMeasure UlcMeasure::binomial(long n, double p) {
  if (n < 1) throw std::invalid_argument("binomial: n must be >= 1");
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("binomial: p must lie in (0, 1)");
  }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    const double log_choose = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
    w[static_cast<std::size_t>(k)] =
        std::exp(log_choose + static_cast<double>(k) * lp + static_cast<double>(n - k) * lq);
  }
  return from_weights(std::move(w), 1.0);
}

UlcMeasure UlcMeasure::bernoulli(double p) {
  if (!(p >= 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("bernoulli: p must lie in [0, 1)");
  }
  if (p == 0.0) return from_weights({1.0}, 1.0);
  return from_weights({1.0 - p, p}, 1.0);
}

double UlcMeasure::intensity_bound() const {
  if (support_top() < 1) return 0.0;
  return std::exp(f_.log_value(1) - f_.log_value(0));
}

std::string UlcMeasure::serialize() const {
  std::string out = "T=" + format_real(horizon_) + "\n";
  for (long k = 0; k <= support_top(); ++k) {
    out += std::to_string(k) + " " + format_real(pv_.weight(k)) + "\n";
  }
  return out;
}

UlcMeasure UlcMeasure::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  double horizon = 0.0;
  bool have_horizon = false;
  std::vector<double> weights;
  long expected_k = 0;
  while (std::getline(in, line)) {
    // Trim trailing carriage return / surrounding blanks.
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    if (!have_horizon) {
      if (line.rfind("T=", 0) != 0) {
        throw std::invalid_argument("UlcMeasure::parse: first line must be T=<real>");
      }
      std::istringstream v(line.substr(2));
      if (!(v >> horizon)) {
        throw std::invalid_argument("UlcMeasure::parse: bad horizon value");
      }
      have_horizon = true;
      continue;
    }
    std::istringstream row(line);
    long k = 0;
    double w = 0.0;
    if (!(row >> k >> w)) {
      throw std::invalid_argument("UlcMeasure::parse: bad support line: " + line);
    }
    std::string extra;
    if (row >> extra) {
      throw std::invalid_argument("UlcMeasure::parse: trailing tokens on line: " + line);
    }
    if (k != expected_k) {
      throw std::invalid_argument("UlcMeasure::parse: support indices must run 0,1,2,...");
    }
    ++expected_k;
    weights.push_back(w);
  }
  if (!have_horizon) throw std::invalid_argument("UlcMeasure::parse: missing T= line");
  if (weights.empty()) throw std::invalid_argument("UlcMeasure::parse: no support lines");
  return from_weights(std::move(weights), horizon);
}

UlcMeasure UlcMeasure::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open measure file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void UlcMeasure::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << serialize();
  if (!out) throw IoError("failed writing measure file: " + path);
}

double phi_entropy(const ProbabilityVector& mu, std::span<const double> g,
                   const std::function<double(double)>& phi, double domain_lo,
                   double domain_hi) {
  if (static_cast<long>(g.size()) <= mu.support_max()) {
    throw std::invalid_argument("phi_entropy: g does not cover the support of mu");
  }
  KahanSum mean;
  for (long k = mu.support_min(); k <= mu.support_max(); ++k) {
    const double gk = g[static_cast<std::size_t>(k)];
    if (!(gk >= domain_lo) || !(gk <= domain_hi)) {
      throw std::domain_error("phi_entropy: g(" + std::to_string(k) + ") = " +
                              format_real(gk) + " outside the phi domain");
    }
    mean.add(gk * mu.weight(k));
  }
  const double m = mean.value();
  if (!(m >= domain_lo) || !(m <= domain_hi)) {
    throw std::domain_error("phi_entropy: mean of g outside the phi domain");
  }
  KahanSum acc;
  for (long k = mu.support_min(); k <= mu.support_max(); ++k) {
    acc.add(phi(g[static_cast<std::size_t>(k)]) * mu.weight(k));
  }
  return acc.value() - phi(m);
}

namespace {

double u_log_u(double u) {
  if (u < 0.0) throw std::domain_error("entropy: g must be >= 0");
  if (u == 0.0) return 0.0;  // 0 * log 0 = 0
  return u * std::log(u);
}

}  // namespace

double entropy(const ProbabilityVector& mu, std::span<const double> g) {
  if (static_cast<long>(g.size()) <= mu.support_max()) {
    throw std::invalid_argument("entropy: g does not cover the support of mu");
  }
  KahanSum mean;
  KahanSum acc;
  for (long k = mu.support_min(); k <= mu.support_max(); ++k) {
    const double gk = g[static_cast<std::size_t>(k)];
    mean.add(gk * mu.weight(k));
    acc.add(u_log_u(gk) * mu.weight(k));
  }
  return acc.value() - u_log_u(mean.value());
}

double relative_entropy(const ProbabilityVector& nu, const ProbabilityVector& mu) {
  KahanSum acc;
  for (long k = nu.support_min(); k <= nu.support_max(); ++k) {
    const double nk = nu.weight(k);
    if (nk <= 0.0) continue;
    const double mk = mu.weight(k);
    if (mk <= 0.0) {
      throw std::domain_error("relative_entropy: nu is not absolutely continuous w.r.t. mu at k=" +
                              std::to_string(k));
    }
    acc.add(nk * std::log(nk / mk));
  }
  return acc.value();
}

double wasserstein1(const ProbabilityVector& nu, const ProbabilityVector& mu) {
  const long n = std::max(nu.size(), mu.size());
  double cdf_nu = 0.0;
  double cdf_mu = 0.0;
  KahanSum acc;
  // The final index is skipped: both CDFs are 1 there up to rounding.
  for (long k = 0; k + 1 < n; ++k) {
    cdf_nu += nu.weight(k);
    cdf_mu += mu.weight(k);
    acc.add(std::abs(cdf_nu - cdf_mu));
  }
  return acc.value();
}

double alpha(double c, double r) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("alpha: c must be finite and > 0");
  }
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("alpha: r must be finite and >= 0");
  }
  const double x = r / c;
  return c * ((1.0 + x) * std::log1p(x) - x);
}

double psi(double u, double v) {
  if (!(u > 0.0) || !std::isfinite(u) || !std::isfinite(v)) {
    throw std::invalid_argument("psi: need finite u > 0 and finite v");
  }
  if (!(u + v > 0.0)) {
    throw std::invalid_argument("psi: need u + v > 0");
  }
  return (u + v) * std::log1p(v / u) - v;
}

ProbabilityVector convolve(const ProbabilityVector& a, const ProbabilityVector& b) {
  std::vector<double> out(static_cast<std::size_t>(a.size() + b.size() - 1), 0.0);
  for (long i = 0; i < a.size(); ++i) {
    const double ai = a.weight(i);
    if (ai == 0.0) continue;
    for (long j = 0; j < b.size(); ++j) {
      out[static_cast<std::size_t>(i + j)] += ai * b.weight(j);
    }
  }
  return ProbabilityVector(std::move(out));
}

}  // namespace ptm
