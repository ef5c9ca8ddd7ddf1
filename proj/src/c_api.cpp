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

#include "ptm.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "ptm/inequalities.hpp"
#include "ptm/measures.hpp"
#include "ptm/report.hpp"
#include "ptm/semigroup.hpp"
#include "ptm/transport.hpp"
#include "ptm/version.hpp"

struct ptm_measure {
  ptm::UlcMeasure value;
};

struct ptm_transporter {
  ptm::Transporter value;
};

struct ptm_path {
  ptm::TransportPath value;
};

namespace {

thread_local std::string g_last_error = "no error";

void set_error(const std::string& message) { g_last_error = message; }

// Runs fn inside the exception-to-status translation shared by every entry
// point.  fn performs all work and out-parameter writes.
template <typename Fn>
ptm_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return PTM_OK;
  } catch (const ptm::IoError& e) {
    set_error(e.what());
    return PTM_ERROR_IO;
  } catch (const std::domain_error& e) {
    set_error(e.what());
    return PTM_ERROR_DOMAIN;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return PTM_ERROR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return PTM_ERROR_INTERNAL;
  } catch (...) {
    set_error("unknown failure");
    return PTM_ERROR_INTERNAL;
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

char* copy_out(const std::string& s) {
  char* mem = static_cast<char*>(std::malloc(s.size() + 1));
  if (mem == nullptr) throw std::bad_alloc();
  std::memcpy(mem, s.c_str(), s.size() + 1);
  return mem;
}

}  // namespace

extern "C" {

const char* ptm_version(void) { return ptm::kVersionString; }

const char* ptm_last_error(void) { return g_last_error.c_str(); }

void ptm_string_free(char* s) { std::free(s); }

/* ---------------- target measures ---------------- */

ptm_status ptm_measure_poisson(double horizon, ptm_measure** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = new ptm_measure{ptm::UlcMeasure::poisson(horizon)};
  });
}

ptm_status ptm_measure_binomial(long n, double p, ptm_measure** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = new ptm_measure{ptm::UlcMeasure::binomial(n, p)};
  });
}

ptm_status ptm_measure_bernoulli(double p, ptm_measure** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = new ptm_measure{ptm::UlcMeasure::bernoulli(p)};
  });
}

ptm_status ptm_measure_from_weights(const double* weights, size_t len,
                                    double horizon, ptm_measure** out) {
  return guarded([&] {
    require(out != nullptr && weights != nullptr, "weights and out must not be NULL");
    require(len > 0, "len must be positive");
    std::vector<double> w(weights, weights + len);
    *out = new ptm_measure{ptm::UlcMeasure::from_weights(std::move(w), horizon)};
  });
}

ptm_status ptm_measure_random(uint64_t seed, long max_support, ptm_measure** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = new ptm_measure{ptm::random_ulc(seed, max_support)};
  });
}

ptm_status ptm_measure_parse(const char* text, ptm_measure** out) {
  return guarded([&] {
    require(out != nullptr && text != nullptr, "text and out must not be NULL");
    *out = new ptm_measure{ptm::UlcMeasure::parse(text)};
  });
}

ptm_status ptm_measure_read_file(const char* path, ptm_measure** out) {
  return guarded([&] {
    require(out != nullptr && path != nullptr, "path and out must not be NULL");
    *out = new ptm_measure{ptm::UlcMeasure::read_file(path)};
  });
}

ptm_status ptm_measure_serialize(const ptm_measure* m, char** out_text) {
  return guarded([&] {
    require(m != nullptr && out_text != nullptr, "measure and out must not be NULL");
    *out_text = copy_out(m->value.serialize());
  });
}

ptm_status ptm_measure_write_file(const ptm_measure* m, const char* path) {
  return guarded([&] {
    require(m != nullptr && path != nullptr, "measure and path must not be NULL");
    m->value.write_file(path);
  });
}

ptm_status ptm_measure_horizon(const ptm_measure* m, double* out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "measure and out must not be NULL");
    *out = m->value.horizon();
  });
}

ptm_status ptm_measure_support_top(const ptm_measure* m, long* out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "measure and out must not be NULL");
    *out = m->value.support_top();
  });
}

ptm_status ptm_measure_weight(const ptm_measure* m, long k, double* out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "measure and out must not be NULL");
    require(k >= 0, "k must be >= 0");
    *out = m->value.weight(k);
  });
}

ptm_status ptm_measure_mean(const ptm_measure* m, double* out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "measure and out must not be NULL");
    *out = m->value.pv().mean();
  });
}

ptm_status ptm_measure_intensity_bound(const ptm_measure* m, double* out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "measure and out must not be NULL");
    *out = m->value.intensity_bound();
  });
}

void ptm_measure_free(ptm_measure* m) { delete m; }

/* ---------------- transport ---------------- */

ptm_status ptm_transporter_new(const ptm_measure* m, ptm_transporter** out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "measure and out must not be NULL");
    *out = new ptm_transporter{ptm::Transporter(m->value)};
  });
}

ptm_status ptm_transporter_semigroup_value(const ptm_transporter* tr, double t,
                                           long k, double* out) {
  return guarded([&] {
    require(tr != nullptr && out != nullptr, "transporter and out must not be NULL");
    *out = tr->value.evaluator().value(t, k);
  });
}

ptm_status ptm_transporter_potential_gap(const ptm_transporter* tr, double t,
                                         long k, double* out) {
  return guarded([&] {
    require(tr != nullptr && out != nullptr, "transporter and out must not be NULL");
    *out = tr->value.evaluator().log_ratio(t, k);
  });
}

ptm_status ptm_transporter_intensity(const ptm_transporter* tr, double t,
                                     long k, double* out) {
  return guarded([&] {
    require(tr != nullptr && out != nullptr, "transporter and out must not be NULL");
    *out = tr->value.evaluator().intensity(t, k);
  });
}

ptm_status ptm_path_new(const ptm_transporter* tr, uint64_t seed,
                        uint64_t replication, ptm_path** out) {
  return guarded([&] {
    require(tr != nullptr && out != nullptr, "transporter and out must not be NULL");
    *out = new ptm_path{tr->value.drive(seed, replication)};
  });
}

ptm_status ptm_path_value_at(const ptm_path* p, double t, long* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "path and out must not be NULL");
    *out = p->value.value_at(t);
  });
}

ptm_status ptm_path_intensity_at(const ptm_path* p, double t, double* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "path and out must not be NULL");
    *out = p->value.intensity_at(t);
  });
}

ptm_status ptm_path_final_value(const ptm_path* p, long* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "path and out must not be NULL");
    *out = p->value.final_value();
  });
}

ptm_status ptm_transporter_malliavin_delta(const ptm_transporter* tr,
                                           uint64_t seed, uint64_t replication,
                                           double t, double z, double s,
                                           long* out) {
  return guarded([&] {
    require(tr != nullptr && out != nullptr, "transporter and out must not be NULL");
    const ptm::PointConfiguration config = tr->value.configuration(seed, replication);
    *out = tr->value.malliavin_delta(config, ptm::Atom{t, z}, s);
  });
}

ptm_status ptm_path_csv(const ptm_path* p, char** out_csv) {
  return guarded([&] {
    require(p != nullptr && out_csv != nullptr, "path and out must not be NULL");
    *out_csv = copy_out(ptm::path_csv(p->value));
  });
}

void ptm_path_free(ptm_path* p) { delete p; }

void ptm_transporter_free(ptm_transporter* tr) { delete tr; }

/* ---------------- verification runners ---------------- */

ptm_status ptm_run_check_ulc(const ptm_measure* m, char** out_json) {
  return guarded([&] {
    require(m != nullptr && out_json != nullptr, "measure and out must not be NULL");
    const ptm::UlcMeasure& mu = m->value;
    const ptm::CheckReport ulc = ptm::check_ulc(mu.pv());
    const ptm::CheckReport lc = ptm::check_log_concave(mu.density());
    double mass = 0.0;
    for (long k = 0; k <= mu.support_top(); ++k) mass += mu.weight(k);
    const bool normalized = std::abs(mass - 1.0) <= 1e-12;
    long violations = 0;
    if (!ulc.passed) ++violations;
    if (!lc.passed) ++violations;
    if (!normalized) ++violations;
    nlohmann::json body{{"ulc", ulc},
                        {"log_concave_density", lc},
                        {"mass", mass},
                        {"normalized", normalized},
                        {"intensity_bound", mu.intensity_bound()},
                        {"support_top", mu.support_top()},
                        {"horizon", mu.horizon()},
                        {"violations", violations}};
    *out_json = copy_out(body.dump(2));
  });
}

ptm_status ptm_run_chain(const ptm_measure* m, double tol_rel, char** out_json) {
  return guarded([&] {
    require(m != nullptr && out_json != nullptr, "measure and out must not be NULL");
    require(tol_rel > 0.0, "tol_rel must be > 0");
    const ptm::ConstantChain constants = ptm::constant_chain(m->value);
    const std::vector<ptm::InequalityReport> results =
        ptm::check_constant_chain(m->value, tol_rel);
    long violations = 0;
    for (const auto& r : results) {
      if (r.asserted && !r.passed) ++violations;
    }
    nlohmann::json body{{"constants", constants},
                        {"results", results},
                        {"violations", violations}};
    *out_json = copy_out(body.dump(2));
  });
}

ptm_status ptm_run_semigroup_csv(const ptm_measure* m, long grid_points,
                                 char** out_csv) {
  return guarded([&] {
    require(m != nullptr && out_csv != nullptr, "measure and out must not be NULL");
    *out_csv = copy_out(ptm::semigroup_csv(m->value, grid_points));
  });
}

ptm_status ptm_run_fokker_planck(const ptm_measure* m, long grid_points,
                                 char** out_json) {
  return guarded([&] {
    require(m != nullptr && out_json != nullptr, "measure and out must not be NULL");
    const ptm::FokkerPlanckReport report =
        ptm::fokker_planck_compare(m->value, grid_points);
    nlohmann::json body = report;
    body["violations"] = report.passed ? 0 : 1;
    *out_json = copy_out(body.dump(2));
  });
}

ptm_status ptm_run_simulate(const ptm_measure* m, long n, uint64_t seed,
                            int threads, char** out_json, char** out_csv) {
  return guarded([&] {
    require(m != nullptr && out_json != nullptr, "measure and out must not be NULL");
    const ptm::Transporter transporter(m->value);
    const std::vector<long> finals = transporter.sample(n, seed, threads);
    std::vector<long> histogram(static_cast<std::size_t>(m->value.support_top()) + 1, 0);
    double sum = 0.0;
    for (long v : finals) {
      ++histogram[static_cast<std::size_t>(v)];
      sum += static_cast<double>(v);
    }
    nlohmann::json body{{"samples", n},
                        {"seed", seed},
                        {"histogram", histogram},
                        {"sample_mean", sum / static_cast<double>(n)},
                        {"target_mean", m->value.pv().mean()},
                        {"violations", 0}};
    *out_json = copy_out(body.dump(2));
    if (out_csv != nullptr) *out_csv = copy_out(ptm::samples_csv(finals));
  });
}

ptm_status ptm_run_marginal(const ptm_measure* m, double time, long n,
                            uint64_t seed, int threads, char** out_json) {
  return guarded([&] {
    require(m != nullptr && out_json != nullptr, "measure and out must not be NULL");
    const ptm::Transporter transporter(m->value);
    const double at = time < 0.0 ? m->value.horizon() : time;
    const ptm::MarginalReport report = transporter.marginal_test(at, n, seed, threads);
    nlohmann::json body = report;
    body["violations"] = report.passed ? 0 : 1;
    *out_json = copy_out(body.dump(2));
  });
}

ptm_status ptm_run_martingale(const ptm_measure* m, long n, long grid_points,
                              uint64_t seed, int threads, char** out_json) {
  return guarded([&] {
    require(m != nullptr && out_json != nullptr, "measure and out must not be NULL");
    require(grid_points >= 2, "grid_points must be >= 2");
    const ptm::Transporter transporter(m->value);
    std::vector<double> times(static_cast<std::size_t>(grid_points));
    for (long i = 0; i < grid_points; ++i) {
      times[static_cast<std::size_t>(i)] = m->value.horizon() * static_cast<double>(i) /
                                           static_cast<double>(grid_points - 1);
    }
    const ptm::MartingaleStats stats =
        transporter.martingale_stats(n, times, seed, threads);
    nlohmann::json body = stats;
    body["violations"] = (stats.level_ok && stats.flat_ok) ? 0 : 1;
    *out_json = copy_out(body.dump(2));
  });
}

ptm_status ptm_run_contraction(const ptm_measure* m, long n_configs,
                               uint64_t seed, long grid_side, int threads,
                               char** out_json) {
  return guarded([&] {
    require(m != nullptr && out_json != nullptr, "measure and out must not be NULL");
    const ptm::Transporter transporter(m->value);
    const ptm::ContractionReport report =
        transporter.check_contraction(n_configs, seed, grid_side, threads);
    nlohmann::json body = report;
    *out_json = copy_out(body.dump(2));
  });
}

ptm_status ptm_run_ineq_sweep(const char* family, long instances, uint64_t seed,
                              long max_support, double tol_rel, int threads,
                              char** out_json, char** out_rows_csv) {
  return guarded([&] {
    require(family != nullptr && out_json != nullptr, "family and out must not be NULL");
    ptm::SweepOptions options;
    options.instances = instances;
    options.seed = seed;
    options.max_support = max_support;
    options.tol_rel = tol_rel;
    options.threads = threads;
    const ptm::SweepSummary summary = ptm::ineq_sweep(family, options);
    nlohmann::json body = summary;
    *out_json = copy_out(body.dump(2));
    if (out_rows_csv != nullptr) *out_rows_csv = copy_out(ptm::sweep_rows_csv(summary));
  });
}

} /* extern "C" */
