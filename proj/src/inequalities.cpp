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

#include "ptm/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ptm/numerics.hpp"
#include "ptm/parallel.hpp"
#include "ptm/semigroup.hpp"

namespace ptm {
namespace {

// Stream ids far above the replication range used by path sampling.
constexpr std::uint64_t kTargetStream = 1ULL << 63;
constexpr std::uint64_t kSweepStreamBase = 1ULL << 62;

InequalityReport identity_report(std::string name, double a, double b, double tol_abs) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = std::abs(a - b);
  r.rhs = 0.0;
  r.constant = 0.0;
  r.slack = -r.lhs;
  r.tolerance = tol_abs;
  r.asserted = true;
  r.passed = r.lhs <= tol_abs;
  return r;
}

double log_constant_of(const UlcMeasure& target) {
  return std::abs(std::log(target.weight(0)));
}

double ratio_constant_of(const UlcMeasure& target) {
  if (target.support_top() < 1) return 0.0;
  return target.weight(1) / target.weight(0);
}

std::string join_reals(std::span<const double> v) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    if (i) out += ",";
    out += buf;
  }
  return out;
}

}  // namespace

ConstantChain constant_chain(const UlcMeasure& target) {
  ConstantChain c;
  c.mean = target.pv().mean();
  c.mean_identity =
      target.horizon() * apply_semigroup(target.density(), target.horizon(), 1);
  c.log_constant = log_constant_of(target);
  c.ratio_constant = ratio_constant_of(target);
  SemigroupEvaluator ev(target.density(), target.horizon());
  c.quadrature = intensity_time_integral(ev, 0);
  return c;
}

std::vector<InequalityReport> check_constant_chain(const UlcMeasure& target,
                                                   double tol_rel) {
  const ConstantChain c = constant_chain(target);
  std::vector<InequalityReport> out;
  out.push_back(identity_report("chain-mean-representation", c.mean, c.mean_identity,
                                1e-10 * std::max(1.0, std::abs(c.mean))));
  out.push_back(make_inequality_report("chain-mean-le-log-constant", c.mean,
                                       c.log_constant, c.log_constant, tol_rel));
  out.push_back(make_inequality_report("chain-log-le-ratio-constant", c.log_constant,
                                       c.ratio_constant, c.ratio_constant, tol_rel));
  const double closed_form = target.horizon() - target.density().log_value(0);
  out.push_back(identity_report("chain-log-closed-form", c.log_constant, closed_form,
                                1e-10 * std::max(1.0, c.log_constant)));
  out.push_back(identity_report("chain-quadrature-crosscheck", c.quadrature,
                                c.log_constant, 1e-6 * std::max(1.0, c.log_constant)));
  return out;
}

PhiSpec::PhiSpec(std::string name, double lo, double hi,
                 std::function<double(double)> phi, std::function<double(double)> dphi)
    : name_(std::move(name)), lo_(lo), hi_(hi), phi_(std::move(phi)), dphi_(std::move(dphi)) {
  if (!(lo_ < hi_)) throw std::invalid_argument("PhiSpec: need lo < hi");
  if (!phi_ || !dphi_) throw std::invalid_argument("PhiSpec: phi and dphi required");
  psi_ = [p = phi_, d = dphi_](double u, double v) {
    return p(u + v) - p(u) - d(u) * v;
  };
}

PhiSpec PhiSpec::entropy() {
  PhiSpec s(
      "entropy", std::numeric_limits<double>::min(), std::numeric_limits<double>::max(),
      [](double u) { return u * std::log(u); }, [](double u) { return std::log(u) + 1.0; });
  s.psi_ = [](double u, double v) { return ptm::psi(u, v); };
  return s;
}

PhiSpec PhiSpec::quadratic() {
  PhiSpec s(
      "quadratic", std::numeric_limits<double>::lowest(),
      std::numeric_limits<double>::max(), [](double u) { return u * u; },
      [](double u) { return 2.0 * u; });
  s.psi_ = [](double, double v) { return v * v; };
  return s;
}

CheckReport PhiSpec::certify(double u_lo, double u_hi, long grid, double tol) const {
  if (!(u_lo < u_hi) || u_lo < lo_ || u_hi > hi_) {
    throw std::invalid_argument("PhiSpec::certify: range must sit inside the domain");
  }
  if (grid < 4) throw std::invalid_argument("PhiSpec::certify: grid must be >= 4");

  CheckReport report;
  report.worst_slack = 0.0;
  const double h = (u_hi - u_lo) / static_cast<double>(grid);
  auto node = [&](long i) { return u_lo + static_cast<double>(i) * h; };
  // Work in (u, w) with w = u + v: a linear reparametrization, so convexity is
  // preserved, and the domain box is a product.
  auto eval = [&](long i, long j) { return psi_(node(i), node(j) - node(i)); };

  static constexpr long kDirs[8][2] = {{1, 0}, {0, 1}, {1, 1},  {1, -1},
                                       {1, 2}, {2, 1}, {1, -2}, {2, -1}};
  for (long i = 0; i <= grid; ++i) {
    for (long j = 0; j <= grid; ++j) {
      const double val = eval(i, j);
      const double scale0 = std::max(1.0, std::abs(val));
      if (val / scale0 < report.worst_slack) report.worst_slack = val / scale0;
      if (val < -tol * scale0 && report.passed) {
        report.passed = false;
        report.first_violation = i * (grid + 1) + j;
      }
      for (const auto& d : kDirs) {
        const long i2 = i + 2 * d[0];
        const long j2 = j + 2 * d[1];
        if (i2 < 0 || i2 > grid || j2 < 0 || j2 > grid) continue;
        const double p = val;
        const double q = eval(i2, j2);
        const double mid = eval(i + d[0], j + d[1]);
        const double scale = std::max({1.0, std::abs(p), std::abs(q), std::abs(mid)});
        const double slack = (0.5 * (p + q) - mid) / scale;
        if (slack < report.worst_slack) report.worst_slack = slack;
        if (slack < -tol && report.passed) {
          report.passed = false;
          report.first_violation = i * (grid + 1) + j;
        }
      }
    }
  }
  return report;
}

namespace {

void require_g(const UlcMeasure& target, std::span<const double> g, bool positive) {
  const long top = target.support_top();
  if (static_cast<long>(g.size()) < top + 2) {
    throw std::invalid_argument("observable must cover the support and one past its top");
  }
  for (long k = 0; k <= top + 1; ++k) {
    const double gk = g[static_cast<std::size_t>(k)];
    if (!std::isfinite(gk)) {
      throw std::invalid_argument("observable must be finite");
    }
    if (positive && !(gk > 0.0)) {
      throw std::domain_error("observable must be positive on the support and one past its top");
    }
  }
}

double expected_psi_with(const UlcMeasure& target, std::span<const double> g,
                         const std::function<double(double, double)>& psi_fn) {
  KahanSum acc;
  for (long k = 0; k <= target.support_top(); ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    acc.add(target.weight(k) * psi_fn(g[i], g[i + 1] - g[i]));
  }
  return acc.value();
}

}  // namespace

MlsiResult mlsi_check(const UlcMeasure& target, std::span<const double> g, double tol_rel) {
  require_g(target, g, true);
  MlsiResult out;
  out.entropy_value = entropy(target.pv(), g);
  out.expected_psi =
      expected_psi_with(target, g, [](double u, double v) { return psi(u, v); });
  const double mean_c = target.pv().mean();
  const double log_c = log_constant_of(target);
  const double ratio_c = ratio_constant_of(target);
  out.log_constant = make_inequality_report("mlsi-log-constant", out.entropy_value,
                                            log_c * out.expected_psi, log_c, tol_rel);
  out.ratio_constant = make_inequality_report("mlsi-ratio-constant", out.entropy_value,
                                              ratio_c * out.expected_psi, ratio_c, tol_rel);
  out.mean_constant =
      make_inequality_report("mlsi-mean-constant", out.entropy_value,
                             mean_c * out.expected_psi, mean_c, tol_rel, false);
  return out;
}

InequalityReport phi_sobolev_check(const UlcMeasure& target, std::span<const double> g,
                                   const PhiSpec& spec, double tol_rel) {
  require_g(target, g, false);
  for (long k = 0; k <= target.support_top() + 1; ++k) {
    const double gk = g[static_cast<std::size_t>(k)];
    if (!(gk >= spec.lo()) || !(gk <= spec.hi())) {
      throw std::domain_error("phi_sobolev_check: observable leaves the phi domain");
    }
  }
  const double lhs = phi_entropy(
      target.pv(), g, [&spec](double u) { return spec.phi(u); }, spec.lo(), spec.hi());
  const double epsi = expected_psi_with(
      target, g, [&spec](double u, double v) { return spec.psi(u, v); });
  const double log_c = log_constant_of(target);
  return make_inequality_report("phi-sobolev-" + spec.name(), lhs, log_c * epsi, log_c,
                                tol_rel);
}

InequalityReport poincare_check(const UlcMeasure& target, std::span<const double> g,
                                double tol_rel) {
  require_g(target, g, false);
  const ProbabilityVector& pv = target.pv();
  KahanSum mean;
  for (long k = 0; k <= target.support_top(); ++k) {
    mean.add(g[static_cast<std::size_t>(k)] * pv.weight(k));
  }
  KahanSum var;
  for (long k = 0; k <= target.support_top(); ++k) {
    const double d = g[static_cast<std::size_t>(k)] - mean.value();
    var.add(d * d * pv.weight(k));
  }
  const double edg2 = expected_psi_with(
      target, g, [](double, double v) { return v * v; });
  const double mean_c = pv.mean();
  return make_inequality_report("poincare", var.value(), mean_c * edg2, mean_c, tol_rel);
}

TransportEntropyResult transport_entropy_check(const UlcMeasure& target,
                                               const ProbabilityVector& nu,
                                               double tol_rel) {
  TransportEntropyResult out;
  out.divergence = relative_entropy(nu, target.pv());
  out.w1 = wasserstein1(nu, target.pv());
  const double ratio_c = ratio_constant_of(target);
  const double log_c = log_constant_of(target);
  const double lhs_ratio = (out.w1 > 0.0 && ratio_c > 0.0) ? alpha(ratio_c, out.w1) : 0.0;
  const double lhs_log = (out.w1 > 0.0 && log_c > 0.0) ? alpha(log_c, out.w1) : 0.0;
  out.asserted = make_inequality_report("transport-entropy", lhs_ratio, out.divergence,
                                        ratio_c, tol_rel);
  out.diagnostic = make_inequality_report("transport-entropy-sharpened", lhs_log,
                                          out.divergence, log_c, tol_rel, false);
  return out;
}

UlcMeasure random_ulc(Rng& rng, long max_support) {
  if (max_support < 1) throw std::invalid_argument("random_ulc: max_support must be >= 1");
  const long n = 1 + static_cast<long>(rng.next_double() * static_cast<double>(max_support));
  const long top = std::min(n, max_support);
  const double horizon = std::exp(rng.next_uniform(-1.2, 1.2));
  std::vector<double> log_f(static_cast<std::size_t>(top) + 1, 0.0);
  double slope = rng.next_uniform(-1.5, 1.5);
  for (long k = 1; k <= top; ++k) {
    log_f[static_cast<std::size_t>(k)] = log_f[static_cast<std::size_t>(k - 1)] + slope;
    slope -= rng.next_uniform(0.0, 1.2);
  }
  return UlcMeasure::from_density(LogConcaveFn::from_log_values(std::move(log_f)), horizon);
}

UlcMeasure random_ulc(std::uint64_t seed, long max_support) {
  Rng rng(seed, kTargetStream);
  return random_ulc(rng, max_support);
}

std::vector<double> random_g(Rng& rng, const UlcMeasure& target, bool positive) {
  std::vector<double> g(static_cast<std::size_t>(target.support_top()) + 2);
  for (double& x : g) {
    x = positive ? std::exp(rng.next_uniform(-2.0, 2.0)) : rng.next_uniform(-3.0, 3.0);
  }
  return g;
}

ProbabilityVector random_tilt(Rng& rng, const UlcMeasure& target) {
  std::vector<double> w(static_cast<std::size_t>(target.support_top()) + 1);
  for (long k = 0; k <= target.support_top(); ++k) {
    w[static_cast<std::size_t>(k)] = target.weight(k) * std::exp(rng.next_uniform(-1.0, 1.0));
  }
  const double total = kahan_total(w);
  for (double& x : w) x /= total;
  return ProbabilityVector(std::move(w));
}

SweepSummary ineq_sweep(const std::string& family, const SweepOptions& options) {
  static const char* kFamilies[] = {"mlsi", "phi", "transport", "chain", "poincare"};
  if (std::find_if(std::begin(kFamilies), std::end(kFamilies),
                   [&](const char* f) { return family == f; }) == std::end(kFamilies)) {
    throw std::invalid_argument("ineq_sweep: unknown family: " + family);
  }
  if (options.instances < 1) {
    throw std::invalid_argument("ineq_sweep: instances must be >= 1");
  }
  if (!(options.tol_rel > 0.0)) {
    throw std::invalid_argument("ineq_sweep: tol_rel must be > 0");
  }

  struct InstanceOut {
    std::vector<SweepRow> rows;
    std::vector<SweepFinding> findings;
  };
  std::vector<InstanceOut> outs(static_cast<std::size_t>(options.instances));

  const PhiSpec entropy_spec = PhiSpec::entropy();
  const PhiSpec quadratic_spec = PhiSpec::quadratic();

  parallel_chunks(options.instances, options.threads, [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      InstanceOut& slot = outs[static_cast<std::size_t>(i)];
      Rng rmu(options.seed, kSweepStreamBase + 2 * static_cast<std::uint64_t>(i));
      Rng raux(options.seed, kSweepStreamBase + 2 * static_cast<std::uint64_t>(i) + 1);
      const UlcMeasure mu = random_ulc(rmu, options.max_support);

      auto add = [&](const InequalityReport& r, const std::string& aux) {
        SweepRow row;
        row.instance = i;
        row.name = r.name;
        row.lhs = r.lhs;
        row.rhs = r.rhs;
        row.constant = r.constant;
        row.slack = r.slack;
        row.asserted = r.asserted;
        row.passed = r.passed;
        slot.rows.push_back(std::move(row));
        if (!r.passed && !r.asserted) {
          SweepFinding f;
          f.instance = i;
          f.name = r.name;
          f.lhs = r.lhs;
          f.rhs = r.rhs;
          f.slack = r.slack;
          f.target_text = mu.serialize();
          f.aux = aux;
          slot.findings.push_back(std::move(f));
        }
      };

      if (family == "mlsi") {
        const std::vector<double> g = random_g(raux, mu, true);
        const MlsiResult r = mlsi_check(mu, g, options.tol_rel);
        const std::string aux = "g=" + join_reals(g);
        add(r.log_constant, aux);
        add(r.ratio_constant, aux);
        add(r.mean_constant, aux);
      } else if (family == "phi") {
        const std::vector<double> g_pos = random_g(raux, mu, true);
        add(phi_sobolev_check(mu, g_pos, entropy_spec, options.tol_rel),
            "g=" + join_reals(g_pos));
        const std::vector<double> g_any = random_g(raux, mu, false);
        add(phi_sobolev_check(mu, g_any, quadratic_spec, options.tol_rel),
            "g=" + join_reals(g_any));
      } else if (family == "transport") {
        const ProbabilityVector nu = random_tilt(raux, mu);
        const TransportEntropyResult r = transport_entropy_check(mu, nu, options.tol_rel);
        const std::string aux = "nu=" + join_reals(nu.weights());
        add(r.asserted, aux);
        add(r.diagnostic, aux);
      } else if (family == "chain") {
        for (const InequalityReport& r : check_constant_chain(mu, options.tol_rel)) {
          add(r, "");
        }
      } else {  // poincare
        const std::vector<double> g = random_g(raux, mu, false);
        add(poincare_check(mu, g, options.tol_rel), "g=" + join_reals(g));
      }
    }
  });

  SweepSummary summary;
  summary.family = family;
  summary.instances = options.instances;
  double worst = std::numeric_limits<double>::infinity();
  for (const InstanceOut& slot : outs) {
    for (const SweepRow& row : slot.rows) {
      if (row.asserted) {
        ++summary.rows_checked;
        if (!row.passed) ++summary.violations;
        worst = std::min(worst, row.slack);
      }
      summary.rows.push_back(row);
    }
    for (const SweepFinding& f : slot.findings) summary.findings.push_back(f);
  }
  summary.worst_slack = summary.rows_checked > 0 ? worst : 0.0;
  return summary;
}

}  // namespace ptm
