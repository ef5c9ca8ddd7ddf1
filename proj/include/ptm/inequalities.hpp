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

#ifndef PTM_INEQUALITIES_HPP_
#define PTM_INEQUALITIES_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ptm/measures.hpp"
#include "ptm/rng.hpp"

namespace ptm {

// The comparison constants attached to a target measure mu with density f and
// horizon T.  They satisfy, in exact arithmetic,
//   mean == T * P_T f(1)  <=  log_constant == T - log f(0)  <=  ratio_constant,
// and log_constant equals the time integral of the k = 0 acceptance intensity
// (estimated here by Simpson quadrature as an independent cross-check).
struct ConstantChain {
  double mean = 0.0;            // E[mu]
  double mean_identity = 0.0;   // T * P_T f(1)
  double log_constant = 0.0;    // |log mu(0)|
  double ratio_constant = 0.0;  // mu(1)/mu(0); 0 for a point mass at 0
  double quadrature = 0.0;      // Simpson integral of intensity(t, 0) over [0, T]
};

ConstantChain constant_chain(const UlcMeasure& target);

// Five reports: the exact mean representation (identity, 1e-10), the two
// one-sided comparisons, the closed form of |log mu(0)| (identity, 1e-10),
// and the quadrature cross-check (1e-6).
std::vector<InequalityReport> check_constant_chain(const UlcMeasure& target,
                                                   double tol_rel = 1e-12);

// A convex functional phi on [lo, hi] together with its Bregman gap
// psi(u, v) = phi(u+v) - phi(u) - phi'(u) v, which is what the Dirichlet-form
// side of a phi-Sobolev comparison integrates.  Named factories plug in
// numerically stable closed forms for psi.
class PhiSpec {
 public:
  PhiSpec(std::string name, double lo, double hi, std::function<double(double)> phi,
          std::function<double(double)> dphi);

  // phi(u) = u log u on (0, inf); psi via the cancellation-free log1p form.
  static PhiSpec entropy();

  // phi(u) = u^2; psi(u, v) = v^2 exactly (the variance form).
  static PhiSpec quadratic();

  const std::string& name() const { return name_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double phi(double u) const { return phi_(u); }
  double psi(double u, double v) const { return psi_(u, v); }

  // Admissibility probe on [u_lo, u_hi]: psi must be nonnegative and midpoint
  // convex along a fixed family of lattice directions (axes, diagonals, and
  // knight-step slopes 2 and 1/2; the latter catch Bregman gaps that are
  // nonnegative yet not jointly convex, e.g. phi(u) = u^3).
  CheckReport certify(double u_lo, double u_hi, long grid = 48,
                      double tol = 1e-10) const;

 private:
  std::string name_;
  double lo_;
  double hi_;
  std::function<double(double)> phi_;
  std::function<double(double)> dphi_;
  std::function<double(double, double)> psi_;
};

// Modified log-Sobolev comparison for positive g (defined on the support and
// one past its top): Ent_mu(g) against C * E_mu[psi(g, Dg)] for the three
// constants of the chain.  The mean-constant variant is a conjecture and is
// reported, never asserted.
struct MlsiResult {
  InequalityReport log_constant;
  InequalityReport ratio_constant;
  InequalityReport mean_constant;
  double entropy_value = 0.0;
  double expected_psi = 0.0;
};

MlsiResult mlsi_check(const UlcMeasure& target, std::span<const double> g,
                      double tol_rel = 1e-12);

// Ent^phi_mu(g) <= |log mu(0)| * E_mu[psi(g, Dg)] for an admissible phi.
InequalityReport phi_sobolev_check(const UlcMeasure& target, std::span<const double> g,
                                   const PhiSpec& spec, double tol_rel = 1e-12);

// Var_mu(g) <= E[mu] * E_mu[(Dg)^2] (the discrete Poincare comparison, tight
// for linear g under a Poisson target).
InequalityReport poincare_check(const UlcMeasure& target, std::span<const double> g,
                                double tol_rel = 1e-12);

// alpha_c(W1(nu, mu)) <= H(nu | mu) with c = mu(1)/mu(0) (asserted) and the
// sharpened c = |log mu(0)| as a reported diagnostic.
struct TransportEntropyResult {
  InequalityReport asserted;
  InequalityReport diagnostic;
  double w1 = 0.0;
  double divergence = 0.0;
};

TransportEntropyResult transport_entropy_check(const UlcMeasure& target,
                                               const ProbabilityVector& nu,
                                               double tol_rel = 1e-12);

// Random ultra-log-concave target: support size uniform in {1..max_support},
// horizon log-uniform in [e^-1.2, e^1.2], log-density slopes non-increasing
// (first slope uniform, then nonnegative decrements).
UlcMeasure random_ulc(Rng& rng, long max_support = 8);
UlcMeasure random_ulc(std::uint64_t seed, long max_support = 8);

// Random observable over support union (support + 1): log-uniform in
// [e^-2, e^2] per coordinate when positive, else uniform in [-3, 3].
std::vector<double> random_g(Rng& rng, const UlcMeasure& target, bool positive);

// Random exponential tilt of the target: nu(k) proportional to
// mu(k) * exp(uniform[-1, 1]), renormalized; absolutely continuous by
// construction.
ProbabilityVector random_tilt(Rng& rng, const UlcMeasure& target);

struct SweepOptions {
  long instances = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  long max_support = 8;
  double tol_rel = 1e-12;
};

struct SweepRow {
  long instance = 0;
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double slack = 0.0;
  bool asserted = true;
  bool passed = true;
};

// A reported-only comparison that came out negative, with enough payload to
// replay it (serialized target plus the auxiliary data of the family).
struct SweepFinding {
  long instance = 0;
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::string target_text;
  std::string aux;
};

struct SweepSummary {
  std::string family;
  long instances = 0;
  long rows_checked = 0;  // asserted rows
  long violations = 0;    // asserted rows that failed
  double worst_slack = 0.0;
  std::vector<SweepRow> rows;
  std::vector<SweepFinding> findings;
};

// family: "mlsi" | "phi" | "transport" | "chain" | "poincare".  Deterministic
// in (family, options): instance i derives its own substreams of the seed,
// rows are merged in instance order.
SweepSummary ineq_sweep(const std::string& family, const SweepOptions& options);

}  // namespace ptm

#endif  // PTM_INEQUALITIES_HPP_
