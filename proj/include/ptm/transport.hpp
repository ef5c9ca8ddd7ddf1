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

#ifndef PTM_TRANSPORT_HPP_
#define PTM_TRANSPORT_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ptm/measures.hpp"
#include "ptm/rng.hpp"
#include "ptm/semigroup.hpp"

namespace ptm {

// One point of the planar driving process: time t in [0, T], mark z in [0, M].
struct Atom {
  double t = 0.0;
  double z = 0.0;
};

// A finite point configuration on the strip [0, T] x [0, M], kept sorted by
// time with strictly increasing times.  A duplicate time (measure-zero event,
// but possible with quantized doubles) is resolved by nudging the later
// inserted atom up by one ulp; `tie_broken` records that this happened.
class PointConfiguration {
 public:
  PointConfiguration() = default;
  explicit PointConfiguration(std::vector<Atom> atoms);

  // Homogeneous Poisson sample on [0, horizon] x [0, intensity_bound]:
  // Poisson(horizon * intensity_bound) many atoms, positions iid uniform.
  // Draw order is fixed (count, then t and z per atom), so a seed pins the
  // configuration.
  static PointConfiguration sample(double horizon, double intensity_bound, Rng& rng);

  // Copy of this configuration with one extra atom inserted (sorted position,
  // ties resolved as above).
  PointConfiguration with_extra(const Atom& extra) const;

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool tie_broken() const { return tie_broken_; }

 private:
  std::vector<Atom> atoms_;
  bool tie_broken_ = false;
};

// The thinned counting path driven by a configuration: sweep atoms in time
// order, accept atom (t, z) iff z <= intensity(t, X_t), where X_t counts the
// previously accepted atoms (left-continuous).  X_T has the target law.
class TransportPath {
 public:
  TransportPath(std::shared_ptr<const SemigroupEvaluator> evaluator,
                PointConfiguration config);

  // X_t: number of accepted atoms with time strictly before t.
  long value_at(double t) const;

  // Acceptance intensity exp(DF(t, X_t)) along this path (left limit at t).
  double intensity_at(double t) const;

  long final_value() const { return final_value_; }
  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<bool>& accepted() const { return accepted_; }
  const PointConfiguration& config() const { return config_; }
  double horizon() const { return evaluator_->horizon(); }

 private:
  std::shared_ptr<const SemigroupEvaluator> evaluator_;
  PointConfiguration config_;
  std::vector<bool> accepted_;
  std::vector<double> jump_times_;
  long final_value_ = 0;
};

// Empirical-vs-exact comparison of the path law at one time.
struct MarginalReport {
  double time = 0.0;
  long samples = 0;
  std::vector<long> counts;        // histogram of X_t
  std::vector<double> expected;    // closed-form law on the same range
  double total_variation = 0.0;    // TV(empirical, closed form)
  double tv_budget = 0.0;          // 3 * sqrt(K / n) rule of thumb
  double chi_square = 0.0;         // bins merged so each expects >= 5
  long chi_square_dof = 0;
  bool passed = false;             // total_variation <= tv_budget
};

// Mean intensity across replications at each grid time; the compensated
// process makes t -> E[intensity] constant, equal to the mean of the target
// divided by the horizon.
struct MartingaleStats {
  std::vector<double> times;
  std::vector<double> mean_intensity;
  std::vector<double> stderr_intensity;
  double expected_level = 0.0;     // P_T f(1) = E[target] / T
  double band_width = 0.0;         // 4 sigma + absolute floor, worst grid point
  double worst_level_gap = 0.0;    // max_i |mean_i - expected|
  double worst_flatness_gap = 0.0; // max_{i,j} |mean_i - mean_j|
  double mean_final_value = 0.0;   // empirical E[X_T]
  bool level_ok = false;
  bool flat_ok = false;
};

// One contraction-audit violation with everything needed to replay it.
// kind: "binary" (derivative outside {0,1}), "case" (derivative disagrees
// with the value forced by its interaction case), "necessary" (derivative 1
// without t < s and z <= intensity), "intensity" (adding an atom raised the
// intensity by more than 1e-12).
struct ContractionViolation {
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  Atom probe;
  double s = 0.0;
  long delta = 0;              // observed X_s(w + probe) - X_s(w)
  double intensity_gap = 0.0;  // intensity(w + probe) - intensity(w) at s
  std::string kind;
};

// Deterministic replay audit of the contraction property.
struct ContractionReport {
  long configurations = 0;
  long probes = 0;
  long triples = 0;          // (config, probe, s) combinations checked
  long violations = 0;
  std::map<std::string, long> census;  // proof-case tallies
  std::vector<ContractionViolation> witnesses;  // capped
  bool passed = false;
};

// Target measure bundled with its semigroup evaluator and the drive logic.
class Transporter {
 public:
  explicit Transporter(UlcMeasure target);

  const UlcMeasure& target() const { return target_; }
  const SemigroupEvaluator& evaluator() const { return *evaluator_; }
  double horizon() const { return target_.horizon(); }
  double intensity_bound() const { return target_.intensity_bound(); }

  // Configuration of replication `replication` under master seed `seed`.
  PointConfiguration configuration(std::uint64_t seed, std::uint64_t replication) const;

  TransportPath drive(const PointConfiguration& config) const;
  TransportPath drive(std::uint64_t seed, std::uint64_t replication) const;

  // n final values X_T, one per replication substream.
  std::vector<long> sample(long n, std::uint64_t seed, int threads = 1) const;

  // Add-one-atom difference X_s(config + extra) - X_s(config).
  long malliavin_delta(const PointConfiguration& config, const Atom& extra, double s) const;

  MarginalReport marginal_test(double time, long n, std::uint64_t seed,
                               int threads = 1) const;

  MartingaleStats martingale_stats(long n, std::span<const double> times,
                                   std::uint64_t seed, int threads = 1) const;

  // For each of n_configs configurations, probes the add-one-atom derivative
  // on a grid_side x grid_side lattice of cell centers plus adaptive probes
  // straddling each atom's (time, intensity) location, evaluating X_s at every
  // jump time of either path and at T.  Verifies: the derivative is binary,
  // a positive derivative implies t < s and z <= intensity(t, X_t), and
  // adding an atom never raises the intensity.  Tallies which case of the
  // interaction analysis each probe/evaluation falls into.
  ContractionReport check_contraction(long n_configs, std::uint64_t seed,
                                      long grid_side = 50, int threads = 1,
                                      long max_witnesses = 16) const;

 private:
  UlcMeasure target_;
  std::shared_ptr<const SemigroupEvaluator> evaluator_;
};

}  // namespace ptm

#endif  // PTM_TRANSPORT_HPP_
