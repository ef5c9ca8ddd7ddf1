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

#include "ptm/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ptm/numerics.hpp"
#include "ptm/parallel.hpp"

namespace ptm {
namespace {

constexpr double kIntensityMonotoneTol = 1e-12;

// Sort by time and enforce strictly increasing times, nudging later atoms up
// by one ulp on a collision.  Returns whether any nudge happened.
bool sort_and_break_ties(std::vector<Atom>& atoms) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.t < b.t; });
  bool nudged = false;
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i].t <= atoms[i - 1].t) {
      atoms[i].t = std::nextafter(atoms[i - 1].t,
                                  std::numeric_limits<double>::infinity());
      nudged = true;
    }
  }
  return nudged;
}

}  // namespace

PointConfiguration::PointConfiguration(std::vector<Atom> atoms)
    : atoms_(std::move(atoms)) {
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.t) || !std::isfinite(a.z)) {
      throw std::invalid_argument("PointConfiguration: atoms must be finite");
    }
  }
  tie_broken_ = sort_and_break_ties(atoms_);
}

PointConfiguration PointConfiguration::sample(double horizon, double intensity_bound,
                                              Rng& rng) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("PointConfiguration::sample: horizon must be > 0");
  }
  if (!(intensity_bound >= 0.0) || !std::isfinite(intensity_bound)) {
    throw std::invalid_argument("PointConfiguration::sample: intensity bound must be >= 0");
  }
  const long count = rng.next_poisson(horizon * intensity_bound);
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    Atom a;
    a.t = rng.next_uniform(0.0, horizon);
    a.z = intensity_bound > 0.0 ? rng.next_uniform(0.0, intensity_bound) : 0.0;
    atoms.push_back(a);
  }
  return PointConfiguration(std::move(atoms));
}

PointConfiguration PointConfiguration::with_extra(const Atom& extra) const {
  std::vector<Atom> atoms = atoms_;
  atoms.push_back(extra);
  return PointConfiguration(std::move(atoms));
}

TransportPath::TransportPath(std::shared_ptr<const SemigroupEvaluator> evaluator,
                             PointConfiguration config)
    : evaluator_(std::move(evaluator)), config_(std::move(config)) {
  if (!evaluator_) {
    throw std::invalid_argument("TransportPath: null evaluator");
  }
  const double horizon = evaluator_->horizon();
  accepted_.reserve(config_.size());
  long x = 0;
  for (const Atom& a : config_.atoms()) {
    if (a.t < 0.0 || a.t >= horizon) {
      throw std::invalid_argument("TransportPath: atom time outside [0, T)");
    }
    if (a.z < 0.0) {
      throw std::invalid_argument("TransportPath: atom mark must be >= 0");
    }
    const bool take = a.z <= evaluator_->intensity(a.t, x);
    accepted_.push_back(take);
    if (take) {
      jump_times_.push_back(a.t);
      ++x;
    }
  }
  final_value_ = x;
}

long TransportPath::value_at(double t) const {
  if (!(t >= 0.0) || t > evaluator_->horizon() * (1.0 + 1e-12)) {
    throw std::invalid_argument("TransportPath: time outside [0, T]");
  }
  // Left-continuous count: jumps strictly before t.
  const auto it = std::lower_bound(jump_times_.begin(), jump_times_.end(), t);
  return static_cast<long>(it - jump_times_.begin());
}

double TransportPath::intensity_at(double t) const {
  return evaluator_->intensity(t, value_at(t));
}

Transporter::Transporter(UlcMeasure target)
    : target_(std::move(target)),
      evaluator_(std::make_shared<SemigroupEvaluator>(target_.density(), target_.horizon())) {}

PointConfiguration Transporter::configuration(std::uint64_t seed,
                                              std::uint64_t replication) const {
  Rng rng(seed, replication);
  return PointConfiguration::sample(horizon(), intensity_bound(), rng);
}

TransportPath Transporter::drive(const PointConfiguration& config) const {
  return TransportPath(evaluator_, config);
}

TransportPath Transporter::drive(std::uint64_t seed, std::uint64_t replication) const {
  return drive(configuration(seed, replication));
}

std::vector<long> Transporter::sample(long n, std::uint64_t seed, int threads) const {
  if (n < 1) throw std::invalid_argument("Transporter::sample: n must be >= 1");
  std::vector<long> out(static_cast<std::size_t>(n), 0);
  parallel_chunks(n, threads, [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      out[static_cast<std::size_t>(i)] =
          drive(seed, static_cast<std::uint64_t>(i)).final_value();
    }
  });
  return out;
}

long Transporter::malliavin_delta(const PointConfiguration& config, const Atom& extra,
                                  double s) const {
  const TransportPath base = drive(config);
  const TransportPath augmented = drive(config.with_extra(extra));
  return augmented.value_at(s) - base.value_at(s);
}

MarginalReport Transporter::marginal_test(double time, long n, std::uint64_t seed,
                                          int threads) const {
  if (n < 1) throw std::invalid_argument("marginal_test: n must be >= 1");
  if (!(time >= 0.0) || time > horizon() * (1.0 + 1e-12)) {
    throw std::invalid_argument("marginal_test: time outside [0, T]");
  }
  const long top = target_.support_top();
  std::vector<long> values(static_cast<std::size_t>(n), 0);
  parallel_chunks(n, threads, [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      values[static_cast<std::size_t>(i)] =
          drive(seed, static_cast<std::uint64_t>(i)).value_at(time);
    }
  });

  MarginalReport report;
  report.time = time;
  report.samples = n;
  report.counts.assign(static_cast<std::size_t>(top) + 1, 0);
  for (long v : values) {
    if (v < 0 || v > top) {
      throw std::logic_error("marginal_test: path value escaped the support");
    }
    ++report.counts[static_cast<std::size_t>(v)];
  }
  report.expected = marginal_closed_form(*evaluator_, time, top);

  KahanSum l1;
  for (long k = 0; k <= top; ++k) {
    const double emp =
        static_cast<double>(report.counts[static_cast<std::size_t>(k)]) / static_cast<double>(n);
    l1.add(std::abs(emp - report.expected[static_cast<std::size_t>(k)]));
  }
  report.total_variation = 0.5 * l1.value();
  report.tv_budget =
      3.0 * std::sqrt(static_cast<double>(top + 1) / static_cast<double>(n));
  report.passed = report.total_variation <= report.tv_budget;

  // Pearson statistic with cells pooled left to right until each pooled cell
  // expects at least 5 counts; the remainder joins the last cell.
  std::vector<double> cell_expected;
  std::vector<double> cell_observed;
  double acc_e = 0.0;
  double acc_o = 0.0;
  for (long k = 0; k <= top; ++k) {
    acc_e += report.expected[static_cast<std::size_t>(k)] * static_cast<double>(n);
    acc_o += static_cast<double>(report.counts[static_cast<std::size_t>(k)]);
    if (acc_e >= 5.0) {
      cell_expected.push_back(acc_e);
      cell_observed.push_back(acc_o);
      acc_e = 0.0;
      acc_o = 0.0;
    }
  }
  if (acc_e > 0.0) {
    if (!cell_expected.empty()) {
      cell_expected.back() += acc_e;
      cell_observed.back() += acc_o;
    } else {
      cell_expected.push_back(acc_e);
      cell_observed.push_back(acc_o);
    }
  }
  double chi2 = 0.0;
  for (std::size_t c = 0; c < cell_expected.size(); ++c) {
    const double d = cell_observed[c] - cell_expected[c];
    chi2 += d * d / cell_expected[c];
  }
  report.chi_square = chi2;
  report.chi_square_dof = static_cast<long>(cell_expected.size()) - 1;
  return report;
}

MartingaleStats Transporter::martingale_stats(long n, std::span<const double> times,
                                              std::uint64_t seed, int threads) const {
  if (n < 2) throw std::invalid_argument("martingale_stats: n must be >= 2");
  if (times.empty()) throw std::invalid_argument("martingale_stats: empty time grid");
  const std::size_t g = times.size();
  for (double t : times) {
    if (!(t >= 0.0) || t > horizon() * (1.0 + 1e-12)) {
      throw std::invalid_argument("martingale_stats: grid time outside [0, T]");
    }
  }

  std::vector<double> lam(static_cast<std::size_t>(n) * g, 0.0);
  std::vector<long> finals(static_cast<std::size_t>(n), 0);
  parallel_chunks(n, threads, [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      const TransportPath path = drive(seed, static_cast<std::uint64_t>(i));
      for (std::size_t j = 0; j < g; ++j) {
        lam[static_cast<std::size_t>(i) * g + j] = path.intensity_at(times[j]);
      }
      finals[static_cast<std::size_t>(i)] = path.final_value();
    }
  });

  MartingaleStats stats;
  stats.times.assign(times.begin(), times.end());
  stats.expected_level = evaluator_->value(0.0, 1);  // P_T f(1)
  std::vector<double> bands(g, 0.0);
  // Deterministic zero-noise grid points (e.g. t = 0) still carry rounding in
  // the expected level, so the band keeps an absolute floor.
  const double floor = 1e-8 * (1.0 + std::abs(stats.expected_level));
  for (std::size_t j = 0; j < g; ++j) {
    KahanSum sum;
    for (long i = 0; i < n; ++i) sum.add(lam[static_cast<std::size_t>(i) * g + j]);
    const double mean = sum.value() / static_cast<double>(n);
    KahanSum sq;
    for (long i = 0; i < n; ++i) {
      const double d = lam[static_cast<std::size_t>(i) * g + j] - mean;
      sq.add(d * d);
    }
    const double var = sq.value() / static_cast<double>(n - 1);
    const double se = std::sqrt(var / static_cast<double>(n));
    stats.mean_intensity.push_back(mean);
    stats.stderr_intensity.push_back(se);
    bands[j] = 4.0 * se + floor;
  }
  stats.band_width = *std::max_element(bands.begin(), bands.end());

  stats.level_ok = true;
  for (std::size_t j = 0; j < g; ++j) {
    const double gap = std::abs(stats.mean_intensity[j] - stats.expected_level);
    stats.worst_level_gap = std::max(stats.worst_level_gap, gap);
    if (gap > bands[j]) stats.level_ok = false;
  }
  const auto lo = std::min_element(stats.mean_intensity.begin(), stats.mean_intensity.end());
  const auto hi = std::max_element(stats.mean_intensity.begin(), stats.mean_intensity.end());
  stats.worst_flatness_gap = *hi - *lo;
  const std::size_t lo_i = static_cast<std::size_t>(lo - stats.mean_intensity.begin());
  const std::size_t hi_i = static_cast<std::size_t>(hi - stats.mean_intensity.begin());
  stats.flat_ok = stats.worst_flatness_gap <= bands[lo_i] + bands[hi_i];

  KahanSum final_sum;
  for (long v : finals) final_sum.add(static_cast<double>(v));
  stats.mean_final_value = final_sum.value() / static_cast<double>(n);
  return stats;
}

namespace {

enum CensusCase : int {
  kCase1 = 0,
  kCase2,
  kCase3Direct,
  kCase31,
  kCase32,
  kCase33,
  kCensusSize
};

const char* census_name(int c) {
  switch (c) {
    case kCase1: return "case-1";
    case kCase2: return "case-2";
    case kCase3Direct: return "case-3-direct";
    case kCase31: return "case-3.1";
    case kCase32: return "case-3.2";
    case kCase33: return "case-3.3";
    default: return "?";
  }
}

struct ConfigAudit {
  long probes = 0;
  long triples = 0;
  std::array<long, kCensusSize> census{};
  std::vector<ContractionViolation> violations;
};

}  // namespace

ContractionReport Transporter::check_contraction(long n_configs, std::uint64_t seed,
                                                 long grid_side, int threads,
                                                 long max_witnesses) const {
  if (n_configs < 1) {
    throw std::invalid_argument("check_contraction: need at least 1 configuration");
  }
  if (grid_side < 1) {
    throw std::invalid_argument("check_contraction: grid side must be >= 1");
  }
  const double T = horizon();
  const double M = intensity_bound();
  const double t_limit = std::nextafter(T, 0.0);  // atom times live in [0, T)
  const double eps_t = 1e-6 * T;
  const double eps_z = M > 0.0 ? 1e-6 * M : 0.0;

  std::vector<ConfigAudit> audits(static_cast<std::size_t>(n_configs));
  parallel_chunks(n_configs, threads, [&](long begin, long end) {
    for (long rep = begin; rep < end; ++rep) {
      ConfigAudit& audit = audits[static_cast<std::size_t>(rep)];
      const PointConfiguration config = configuration(seed, static_cast<std::uint64_t>(rep));
      const TransportPath base = drive(config);

      std::vector<Atom> probes;
      probes.reserve(static_cast<std::size_t>(grid_side * grid_side) + 4 * config.size());
      for (long i = 0; i < grid_side; ++i) {
        for (long j = 0; j < grid_side; ++j) {
          Atom p;
          p.t = T * (static_cast<double>(i) + 0.5) / static_cast<double>(grid_side);
          p.z = M * (static_cast<double>(j) + 0.5) / static_cast<double>(grid_side);
          probes.push_back(p);
        }
      }
      // Adaptive probes straddling each atom's own (time, intensity) corner;
      // these force evaluations right at the acceptance boundary.
      for (const Atom& a : config.atoms()) {
        const double lam = base.intensity_at(a.t);
        for (int corner = 0; corner < 4; ++corner) {
          Atom p;
          p.t = a.t + ((corner & 1) ? eps_t : -eps_t);
          p.z = lam + ((corner & 2) ? eps_z : -eps_z);
          p.t = std::clamp(p.t, 0.0, t_limit);
          p.z = std::clamp(p.z, 0.0, M);
          probes.push_back(p);
        }
      }

      for (const Atom& probe : probes) {
        ++audit.probes;
        const PointConfiguration augmented = config.with_extra(probe);
        const TransportPath aug = drive(augmented);

        // Evaluation times: every jump of either path, plus the horizon.
        std::vector<double> s_set;
        s_set.reserve(base.jump_times().size() + aug.jump_times().size() + 1);
        s_set.insert(s_set.end(), base.jump_times().begin(), base.jump_times().end());
        s_set.insert(s_set.end(), aug.jump_times().begin(), aug.jump_times().end());
        s_set.push_back(T);
        std::sort(s_set.begin(), s_set.end());
        s_set.erase(std::unique(s_set.begin(), s_set.end()), s_set.end());

        const double lam_probe_base = base.intensity_at(probe.t);
        const double lam_probe_aug = aug.intensity_at(probe.t);
        const bool probe_counted = probe.z <= lam_probe_aug;

        auto record = [&](const char* kind, double s, long delta, double gap) {
          ContractionViolation v;
          v.seed = seed;
          v.replication = static_cast<std::uint64_t>(rep);
          v.probe = probe;
          v.s = s;
          v.delta = delta;
          v.intensity_gap = gap;
          v.kind = kind;
          audit.violations.push_back(std::move(v));
        };

        for (double s : s_set) {
          ++audit.triples;
          const long delta = aug.value_at(s) - base.value_at(s);
          if (delta != 0 && delta != 1) record("binary", s, delta, 0.0);

          if (delta == 1) {
            // Derivative 1 forces: probe strictly earlier than s, mark below
            // the (unchanged) intensity at the probe's location.
            if (!(probe.t < s) || !(probe.z <= lam_probe_base) ||
                lam_probe_aug != lam_probe_base) {
              record("necessary", s, delta, lam_probe_aug - lam_probe_base);
            }
          }

          // Interaction-case classification and the value it forces.
          int census_case;
          long forced = -1;  // -1: both 0 and 1 admissible
          if (s <= probe.t) {
            census_case = kCase1;
            forced = 0;
          } else if (!probe_counted) {
            census_case = kCase2;
            forced = 0;
          } else {
            // First original atom strictly between the probe and s.
            const Atom* first = nullptr;
            for (const Atom& a : config.atoms()) {
              if (a.t > probe.t && a.t < s) {
                first = &a;
                break;
              }
            }
            if (first == nullptr) {
              census_case = kCase3Direct;
              forced = 1;
            } else {
              const double lam_base = base.intensity_at(first->t);
              const double lam_aug = aug.intensity_at(first->t);
              if (first->z <= lam_aug) {
                census_case = kCase31;
              } else if (first->z > lam_base) {
                census_case = kCase32;
              } else {
                census_case = kCase33;
                forced = 0;  // paths coalesce at this atom and stay together
              }
            }
          }
          ++audit.census[static_cast<std::size_t>(census_case)];
          if (forced >= 0 && delta != forced) {
            record("case", s, delta, 0.0);
          }

          // Adding an atom can only lower the acceptance intensity.
          const double gap = aug.intensity_at(s) - base.intensity_at(s);
          if (gap > kIntensityMonotoneTol) record("intensity", s, delta, gap);
        }
      }
    }
  });

  ContractionReport report;
  report.configurations = n_configs;
  for (int c = 0; c < kCensusSize; ++c) report.census[census_name(c)] = 0;
  for (const ConfigAudit& audit : audits) {
    report.probes += audit.probes;
    report.triples += audit.triples;
    for (int c = 0; c < kCensusSize; ++c) {
      report.census[census_name(c)] += audit.census[static_cast<std::size_t>(c)];
    }
    report.violations += static_cast<long>(audit.violations.size());
    for (const ContractionViolation& v : audit.violations) {
      if (static_cast<long>(report.witnesses.size()) < max_witnesses) {
        report.witnesses.push_back(v);
      }
    }
  }
  report.passed = report.violations == 0;
  return report;
}

}  // namespace ptm
