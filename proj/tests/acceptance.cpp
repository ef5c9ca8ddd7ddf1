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

// Acceptance harness: eleven end-to-end criteria covering the transport map,
// its contraction property, and the functional-inequality suite.  Prints one
// [PASS]/[FAIL] line per criterion and exits nonzero if any failed.  All
// seeds are fixed, so a run is exactly reproducible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "ptm/inequalities.hpp"
#include "ptm/measures.hpp"
#include "ptm/rng.hpp"
#include "ptm/semigroup.hpp"
#include "ptm/transport.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

struct NamedTarget {
  std::string name;
  ptm::UlcMeasure measure;
};

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

template <typename Body>
void criterion(int id, const Body& body) {
  const Clock::time_point start = Clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.detail = std::string("unexpected exception: ") + e.what();
  }
  if (!outcome.ok) ++failures;
  std::printf("[%s] criterion %d: %s [%.1f s]\n", outcome.ok ? "PASS" : "FAIL", id,
              outcome.detail.c_str(), seconds_since(start));
  std::fflush(stdout);
}

// Closed-form law of X_t under the target's (density, horizon) representation,
// evaluated with the long double linear-arithmetic oracle rather than the
// library's log-space path.
std::vector<double> oracle_law(const ptm::UlcMeasure& mu, double time) {
  const long top = mu.support_top();
  std::vector<double> density(static_cast<std::size_t>(top) + 1);
  for (long k = 0; k <= top; ++k) {
    density[static_cast<std::size_t>(k)] = mu.density().value(k);
  }
  std::vector<double> law(static_cast<std::size_t>(top) + 1);
  for (long k = 0; k <= top; ++k) {
    law[static_cast<std::size_t>(k)] =
        oracle::semigroup(density, mu.horizon() - time, k) *
        oracle::poisson_pmf(time, k);
  }
  return law;
}

}  // namespace

int main() {
  const int threads = static_cast<int>(
      std::clamp(std::thread::hardware_concurrency(), 1u, 8u));

  std::vector<NamedTarget> targets;
  targets.push_back({"poisson(1)", ptm::UlcMeasure::poisson(1.0)});
  targets.push_back({"binomial(3,0.5)", ptm::UlcMeasure::binomial(3, 0.5)});
  targets.push_back({"bernoulli(0.5)", ptm::UlcMeasure::bernoulli(0.5)});
  for (int i = 0; i < 10; ++i) {
    targets.push_back({"random#" + std::to_string(i),
                       ptm::random_ulc(static_cast<std::uint64_t>(1000 + i), 8)});
  }

  std::printf("acceptance: %zu targets, %d worker threads\n", targets.size(), threads);

  // 1. The transported law matches the target at the horizon and halfway.
  criterion(1, [&]() -> Outcome {
    const long n = 100000;
    bool ok = true;
    double worst_tv = 0.0;
    std::string worst_at = "-";
    double slowest = 0.0;
    for (const NamedTarget& target : targets) {
      const Clock::time_point t0 = Clock::now();
      const ptm::Transporter transporter(target.measure);
      const double horizon = target.measure.horizon();
      for (const double time : {horizon, 0.5 * horizon}) {
        const ptm::MarginalReport report =
            transporter.marginal_test(time, n, 101, threads);
        const std::vector<double> expected = oracle_law(target.measure, time);
        long double l1 = 0.0L;
        for (std::size_t k = 0; k < expected.size(); ++k) {
          const long double empirical =
              static_cast<long double>(report.counts[k]) / static_cast<long double>(n);
          l1 += std::abs(empirical - static_cast<long double>(expected[k]));
        }
        const double tv = 0.5 * static_cast<double>(l1);
        if (tv > worst_tv) {
          worst_tv = tv;
          worst_at = target.name + (time == horizon ? " at t=T" : " at t=T/2");
        }
        ok = ok && tv <= 0.01 && report.passed;
      }
      slowest = std::max(slowest, seconds_since(t0));
    }
    ok = ok && slowest <= 60.0;
    return {ok, "sampled law vs oracle closed form at t=T and t=T/2, " +
                    std::to_string(targets.size()) + " targets, n=100000: worst TV " +
                    num(worst_tv) + " at " + worst_at +
                    " (budget 0.01); slowest target " + num(slowest) +
                    " s (limit 60)"};
  });

  // 2. Forward-equation evolution agrees with the closed-form marginals.
  criterion(2, [&]() -> Outcome {
    bool ok = true;
    double worst = 0.0;
    std::string worst_at = "-";
    for (const NamedTarget& target : targets) {
      const ptm::FokkerPlanckReport report =
          ptm::fokker_planck_compare(target.measure, 21);
      if (report.max_error > worst) {
        worst = report.max_error;
        worst_at = target.name;
      }
      ok = ok && report.passed && report.max_error <= 1e-6;
    }
    return {ok, "pure-birth evolution vs closed form on 21 grid times: worst sup "
                "error " +
                    num(worst) + " at " + worst_at + " (tolerance 1e-06)"};
  });

  // 3 & 4. Replay audit of the add-one-atom derivative.  One audit feeds both
  // criteria: binary/necessary/forced-case checks here, the intensity
  // comparison in criterion 4.
  std::vector<ptm::ContractionReport> audits;
  double audit_seconds = 0.0;
  {
    const Clock::time_point t0 = Clock::now();
    for (const NamedTarget& target : targets) {
      const ptm::Transporter transporter(target.measure);
      audits.push_back(
          transporter.check_contraction(80, 202, 12, threads, 100000));
    }
    audit_seconds = seconds_since(t0);
  }

  criterion(3, [&]() -> Outcome {
    bool ok = true;
    long min_triples = std::numeric_limits<long>::max();
    long total_triples = 0;
    long structural = 0;  // binary, forced-case, or necessary-condition breaches
    std::map<std::string, long> census;
    for (const ptm::ContractionReport& report : audits) {
      min_triples = std::min(min_triples, report.triples);
      total_triples += report.triples;
      for (const auto& [key, count] : report.census) census[key] += count;
      for (const ptm::ContractionViolation& w : report.witnesses) {
        if (w.kind != "intensity") ++structural;
      }
    }
    ok = ok && min_triples >= 10000 && structural == 0;
    std::string coverage;
    for (const char* key : {"case-1", "case-2", "case-3-direct", "case-3.1",
                            "case-3.2", "case-3.3"}) {
      ok = ok && census[key] >= 1;
      coverage += std::string(coverage.empty() ? "" : ", ") + key + "=" +
                  std::to_string(census[key]);
    }
    return {ok, "derivative stayed in {0,1} with its necessary condition on " +
                    std::to_string(total_triples) + " triples (min " +
                    std::to_string(min_triples) +
                    " per target, required 10000); structural violations " +
                    std::to_string(structural) + "; census " + coverage};
  });

  criterion(4, [&]() -> Outcome {
    bool ok = true;
    long probes = 0;
    long raised = 0;
    for (const ptm::ContractionReport& report : audits) {
      probes += report.probes;
      ok = ok && report.violations == 0;
      for (const ptm::ContractionViolation& w : report.witnesses) {
        if (w.kind == "intensity") ++raised;
      }
    }
    ok = ok && raised == 0;
    return {ok, "adding an atom never raised the acceptance intensity beyond "
                "1e-12 across " +
                    std::to_string(probes) + " probes (same audit as criterion "
                    "3, " +
                    num(audit_seconds) + " s); violations " +
                    std::to_string(raised)};
  });

  // 5. The compensated intensity is a flat martingale at its predicted level.
  criterion(5, [&]() -> Outcome {
    bool ok = true;
    double worst_gap = 0.0;
    double band = 0.0;
    double bernoulli_exact = -1.0;
    for (std::size_t idx : {0u, 1u, 2u, 3u, 4u}) {
      const NamedTarget& target = targets[idx];
      const double horizon = target.measure.horizon();
      std::vector<double> times(5);
      for (int i = 0; i < 5; ++i) times[static_cast<std::size_t>(i)] = horizon * i / 4.0;
      const ptm::Transporter transporter(target.measure);
      const ptm::MartingaleStats stats =
          transporter.martingale_stats(100000, times, 303, threads);
      ok = ok && stats.level_ok && stats.flat_ok;
      if (stats.worst_level_gap > worst_gap) {
        worst_gap = stats.worst_level_gap;
        band = stats.band_width;
      }
      if (target.name == "bernoulli(0.5)") {
        bernoulli_exact = std::abs(stats.expected_level - 0.5);
        ok = ok && bernoulli_exact <= 1e-12;
      }
    }
    return {ok, "mean intensity flat at its predicted level on 5-point grids "
                "(n=100000, 5 targets, 4-sigma bands): worst level gap " +
                    num(worst_gap) + " vs band " + num(band) +
                    "; bernoulli(0.5) level off by " + num(bernoulli_exact) +
                    " from 1/2 (required 1e-12)"};
  });

  // 6. The constant chain: exact mean representation and the two comparisons.
  criterion(6, [&]() -> Outcome {
    ptm::Rng rng(404, 0);
    long failed_rows = 0;
    double worst_identity = 0.0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
      const ptm::UlcMeasure mu = ptm::random_ulc(rng, 8);
      const ptm::ConstantChain c = ptm::constant_chain(mu);
      worst_identity = std::max(worst_identity, std::abs(c.mean - c.mean_identity));
      min_slack = std::min({min_slack, c.log_constant - c.mean,
                            c.ratio_constant - c.log_constant});
      for (const ptm::InequalityReport& r : ptm::check_constant_chain(mu)) {
        if (r.asserted && !r.passed) ++failed_rows;
      }
    }
    bool ok = failed_rows == 0 && worst_identity <= 1e-10 && min_slack >= -1e-12;ytho
    const ptm::ConstantChain unit = ptm::constant_chain(ptm::UlcMeasure::poisson(1.0));
    double unit_gap = 0.0;
    for (double v : {unit.mean, unit.mean_identity, unit.log_constant,
                     unit.ratio_constant, unit.quadrature}) {
      unit_gap = std::max(unit_gap, std::abs(v - 1.0));
    }
    ok = ok && unit_gap <= 1e-8;
    return {ok, "1000 random targets: worst |mean - T P_T f(1)| " +
                    num(worst_identity) + " (required 1e-10), smallest ordering "
                    "slack " +
                    num(min_slack) + " (required -1e-12), failed rows " +
                    std::to_string(failed_rows) + "; poisson(1) constants within " +
                    num(unit_gap) + " of 1 (required 1e-8)"};
  });

  // 7. Modified log-Sobolev sweep.
  criterion(7, [&]() -> Outcome {
    const Clock::time_point t0 = Clock::now();
    ptm::SweepOptions options;
    options.instances = 10000;
    options.seed = 505;
    options.threads = threads;
    const ptm::SweepSummary s = ptm::ineq_sweep("mlsi", options);
    const double elapsed = seconds_since(t0);
    const bool ok = s.violations == 0 && s.rows_checked == 20000 && elapsed <= 30.0;
    return {ok, "entropy vs weighted Bregman-gap energy on 10000 random pairs: " +
                    std::to_string(s.violations) + " of " +
                    std::to_string(s.rows_checked) +
                    " asserted rows violated, worst slack " + num(s.worst_slack) +
                    "; elapsed " + num(elapsed) + " s (limit 30)"};
  });

  // 8. Phi-Sobolev sweep for the entropy and quadratic functionals.
  criterion(8, [&]() -> Outcome {
    ptm::SweepOptions options;
    options.instances = 10000;
    options.seed = 606;
    options.threads = threads;
    const ptm::SweepSummary s = ptm::ineq_sweep("phi", options);
    const bool ok = s.violations == 0 && s.rows_checked == 20000;
    return {ok, "phi-Sobolev for u log u and u^2, 10000 random pairs each: " +
                    std::to_string(s.violations) + " of " +
                    std::to_string(s.rows_checked) +
                    " rows violated, worst slack " + num(s.worst_slack)};
  });

  // 9. Transport-entropy comparison plus an independent Wasserstein oracle.
  criterion(9, [&]() -> Outcome {
    ptm::SweepOptions options;
    options.instances = 10000;
    options.seed = 707;
    options.threads = threads;
    const ptm::SweepSummary s = ptm::ineq_sweep("transport", options);
    bool ok = s.violations == 0 && s.rows_checked == 10000;

    ptm::Rng rng(808, 0);
    double worst_w1 = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const ptm::UlcMeasure mu = ptm::random_ulc(rng, 6);
      const ptm::ProbabilityVector nu = ptm::random_tilt(rng, mu);
      const double lib = ptm::wasserstein1(nu, mu.pv());
      const double ref = oracle::wasserstein1_coupling(nu.weights(), mu.pv().weights());
      worst_w1 = std::max(worst_w1, std::abs(lib - ref));
    }
    ok = ok && worst_w1 <= 1e-9;

    // Deterministic edges with known distances.
    struct Edge {
      ptm::ProbabilityVector nu;
      ptm::ProbabilityVector mu;
      double distance;
    };
    const std::vector<Edge> edges = {
        {ptm::ProbabilityVector::delta(1), ptm::ProbabilityVector::delta(0), 1.0},
        {ptm::ProbabilityVector::delta(0), ptm::UlcMeasure::bernoulli(0.5).pv(), 0.5},
        {ptm::UlcMeasure::poisson(1.0).pv(), ptm::UlcMeasure::poisson(1.0).pv(), 0.0},
    };
    double worst_edge = 0.0;
    for (const Edge& e : edges) {
      worst_edge = std::max(worst_edge,
                            std::abs(ptm::wasserstein1(e.nu, e.mu) - e.distance));
      worst_edge = std::max(
          worst_edge, std::abs(oracle::wasserstein1_coupling(e.nu.weights(),
                                                             e.mu.weights()) -
                               e.distance));
    }
    ok = ok && worst_edge <= 1e-12;
    return {ok, "alpha(W1) <= divergence on 10000 random pairs (" +
                    std::to_string(s.violations) +
                    " violations); W1 vs monotone-coupling oracle on 2000 pairs: "
                    "worst gap " +
                    num(worst_w1) + " (required 1e-9); known edges off by " +
                    num(worst_edge)};
  });

  // 10. Poincare comparison, sharp for linear observables under poisson(1).
  criterion(10, [&]() -> Outcome {
    ptm::SweepOptions options;
    options.instances = 10000;
    options.seed = 909;
    options.threads = threads;
    const ptm::SweepSummary s = ptm::ineq_sweep("poincare", options);
    bool ok = s.violations == 0 && s.rows_checked == 10000;

    const ptm::UlcMeasure mu = ptm::UlcMeasure::poisson(1.0);
    std::vector<double> g(static_cast<std::size_t>(mu.support_top()) + 2);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = static_cast<double>(k);
    const ptm::InequalityReport r = ptm::poincare_check(mu, g);
    const double equality_gap = std::abs(r.lhs - r.rhs);
    ok = ok && r.passed && equality_gap <= 1e-8;
    return {ok, "variance vs mean-weighted gradient energy on 10000 random "
                "pairs: " +
                    std::to_string(s.violations) +
                    " violations; poisson(1) with g(k)=k meets equality within " +
                    num(equality_gap) + " (required 1e-8)"};
  });

  // 11. Structural properties of the smoothing semigroup.
  criterion(11, [&]() -> Outcome {
    bool ok = true;

    // Second-order convergence of the interpolation-equation residual.
    const ptm::LogConcaveFn f =
        ptm::LogConcaveFn::from_log_values({0.7, 0.9, 0.4, -0.3, -1.2});
    double worst_ratio_gap = 0.0;
    double worst_residual = 0.0;
    for (const auto& [t, k] : std::vector<std::pair<double, long>>{
             {0.8, 0L}, {0.8, 1L}, {1.5, 2L}}) {
      const double coarse = ptm::pde_residual(f, t, k, 1e-2);
      const double fine = ptm::pde_residual(f, t, k, 5e-3);
      if (coarse > 1e-12) {
        const double ratio = coarse / fine;
        worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 4.0));
        ok = ok && ratio >= 3.4 && ratio <= 4.6;
      }
      const double tight = ptm::pde_residual(f, t, k, 1e-4);
      worst_residual = std::max(worst_residual, tight);
      ok = ok && tight <= 1e-6;
    }

    // Class preservation and intensity time-monotonicity on random densities.
    ptm::Rng rng(111, 0);
    long sweep_failures = 0;
    for (int i = 0; i < 500; ++i) {
      const long top = 1 + static_cast<long>(rng.next_double() * 9.0);
      std::vector<double> log_f(static_cast<std::size_t>(top) + 1);
      log_f[0] = rng.next_uniform(-0.5, 0.5);
      double slope = rng.next_uniform(-2.0, 2.0);
      for (long k = 1; k <= top; ++k) {
        log_f[static_cast<std::size_t>(k)] =
            log_f[static_cast<std::size_t>(k - 1)] + slope;
        slope -= rng.next_uniform(0.0, 1.5);
      }
      const ptm::LogConcaveFn fn = ptm::LogConcaveFn::from_log_values(std::move(log_f));
      const double horizon = std::exp(rng.next_uniform(-1.0, 1.0));
      for (const double s : {0.1 * horizon, 0.5 * horizon, horizon}) {
        if (!ptm::check_lc_preserved(fn, s).passed) ++sweep_failures;
      }
      const ptm::SemigroupEvaluator ev(fn, horizon);
      std::vector<double> grid(21);
      for (int j = 0; j < 21; ++j) {
        grid[static_cast<std::size_t>(j)] = horizon * j / 20.0;
      }
      for (long k = 0; k <= std::min<long>(2, top - 1); ++k) {
        if (!ptm::check_ratio_monotone(ev, k, grid).passed) ++sweep_failures;
      }
    }
    ok = ok && sweep_failures == 0;
    return {ok, "residual halves 4x per step halving (worst ratio gap " +
                    num(worst_ratio_gap) + ", residual at h=1e-4 " +
                    num(worst_residual) +
                    "); log-concavity preserved and intensity time-monotone on "
                    "500 random densities (" +
                    std::to_string(sweep_failures) + " failures)"};
  });

  if (failures == 0) {
    std::printf("acceptance: all 11 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return 1;
}
