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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "ptm/inequalities.hpp"
#include "ptm/measures.hpp"
#include "ptm/rng.hpp"

namespace {

std::vector<double> normalized(std::vector<double> w) {
  double sum = 0.0;
  for (double x : w) sum += x;
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace

TEST_CASE("log_factorial matches a direct log sum") {
  for (long n : {0L, 1L, 2L, 5L, 10L, 100L, 1000L, 4095L, 5000L}) {
    long double direct = 0.0L;
    for (long i = 2; i <= n; ++i) direct += std::log(static_cast<long double>(i));
    CHECK(ptm::log_factorial(n) ==
          doctest::Approx(static_cast<double>(direct)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(ptm::log_factorial(-1), std::invalid_argument);
}

TEST_CASE("poisson_pmf agrees with the long double product oracle") {
  for (double rate : {0.3, 1.0, 4.5, 20.0}) {
    for (long k = 0; k <= 60; ++k) {
      const double mine = ptm::poisson_pmf(rate, k);
      const double ref = oracle::poisson_pmf(rate, k);
      CHECK(mine == doctest::Approx(ref).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(ptm::poisson_pmf(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(ptm::poisson_pmf(-2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(ptm::poisson_pmf(1.0, -1), std::invalid_argument);
}

TEST_CASE("LogConcaveFn stores matched linear and log views") {
  const ptm::LogConcaveFn f({2.0, 1.0, 0.25});
  CHECK(f.top() == 2);
  CHECK(f.value(0) == 2.0);
  CHECK(f.value(3) == 0.0);
  CHECK(f.log_value(1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f.log_value(5) == -std::numeric_limits<double>::infinity());

  const ptm::LogConcaveFn g = ptm::LogConcaveFn::from_log_values({0.0, -700.0});
  CHECK(g.log_value(1) == -700.0);
  CHECK(g.value(1) == doctest::Approx(std::exp(-700.0)));

  CHECK_THROWS_AS(ptm::LogConcaveFn({}), std::invalid_argument);
  CHECK_THROWS_AS(ptm::LogConcaveFn({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ptm::LogConcaveFn({1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("check_log_concave flags the first bad index and stays scale invariant") {
  CHECK(ptm::check_log_concave(std::vector<double>{1.0, 1.0, 1.0}).passed);
  // Geometric sequences sit exactly on the boundary.
  CHECK(ptm::check_log_concave(std::vector<double>{8.0, 4.0, 2.0, 1.0}).passed);

  const ptm::CheckReport bad = ptm::check_log_concave(std::vector<double>{1.0, 1.0, 3.0});
  CHECK_FALSE(bad.passed);
  CHECK(bad.first_violation == 1);
  CHECK(bad.worst_slack < -1.0);  // log 1 - log 3 is about -1.1

  // Rescaling by an extreme constant must not change the verdict (log domain).
  const ptm::CheckReport huge =
      ptm::check_log_concave(std::vector<double>{1e300, 1e300, 3e300});
  CHECK_FALSE(huge.passed);
  CHECK(huge.first_violation == 1);
  const ptm::CheckReport tiny =
      ptm::check_log_concave(std::vector<double>{8e-300, 4e-300, 2e-300, 1e-300});
  CHECK(tiny.passed);
}

TEST_CASE("ProbabilityVector validates mass, sign, and contiguous support") {
  const ptm::ProbabilityVector pv({0.25, 0.5, 0.25});
  CHECK(pv.size() == 3);
  CHECK(pv.mean() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pv.variance() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pv.support_min() == 0);
  CHECK(pv.support_max() == 2);
  CHECK(pv.weight(-1) == 0.0);
  CHECK(pv.weight(7) == 0.0);

  // Leading and trailing zeros are fine; interior zeros are not.
  const ptm::ProbabilityVector shifted({0.0, 1.0, 0.0});
  CHECK(shifted.support_min() == 1);
  CHECK(shifted.support_max() == 1);
  CHECK_THROWS_AS(ptm::ProbabilityVector({0.5, 0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(ptm::ProbabilityVector({0.4, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(ptm::ProbabilityVector({1.2, -0.2}), std::invalid_argument);
  CHECK_THROWS_AS(ptm::ProbabilityVector({0.0, 0.0}), std::invalid_argument);

  const ptm::ProbabilityVector d = ptm::ProbabilityVector::delta(3);
  CHECK(d.weight(3) == 1.0);
  CHECK(d.mean() == 3.0);
  CHECK(d.variance() == 0.0);
}

TEST_CASE("check_ulc separates poisson-boundary cases from violations") {
  // Poisson weights satisfy the defining comparison with equality.
  std::vector<double> pois(12);
  for (long k = 0; k < 12; ++k) pois[static_cast<std::size_t>(k)] = oracle::poisson_pmf(1.7, k);
  const ptm::CheckReport eq = ptm::check_ulc(pois);
  CHECK(eq.passed);
  CHECK(std::abs(eq.worst_slack) < 1e-12);

  // (1,1,3)/5 fails at k = 1: 0.04 against 2 * 0.2 * 0.6 = 0.24.
  const ptm::CheckReport bad = ptm::check_ulc(normalized({1.0, 1.0, 3.0}));
  CHECK_FALSE(bad.passed);
  CHECK(bad.first_violation == 1);

  // Binomial weights are strictly inside the class.
  std::vector<double> binom(4);
  for (long k = 0; k < 4; ++k) binom[static_cast<std::size_t>(k)] = oracle::binomial_pmf(3, 0.5, k);
  CHECK(ptm::check_ulc(binom).passed);
  CHECK(oracle::is_ulc(binom));
}

TEST_CASE("UlcMeasure::poisson truncates the tail and keeps density one") {
  const ptm::UlcMeasure mu = ptm::UlcMeasure::poisson(2.0);
  CHECK(mu.horizon() == 2.0);
  CHECK(mu.intensity_bound() == 1.0);  // f is identically one
  double mass = 0.0;
  for (long k = 0; k <= mu.support_top(); ++k) {
    CHECK(mu.weight(k) ==
          doctest::Approx(oracle::poisson_pmf(2.0, k)).epsilon(1e-12));
    mass += mu.weight(k);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
  // The retained range must cover everything but a <= 1e-14 tail.
  double tail = 0.0;
  for (long k = mu.support_top() + 1; k < mu.support_top() + 200; ++k) {
    tail += oracle::poisson_pmf(2.0, k);
  }
  CHECK(tail <= 1.1e-14);
  CHECK_THROWS_AS(ptm::UlcMeasure::poisson(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ptm::UlcMeasure::poisson(-1.0), std::invalid_argument);
}

TEST_CASE("UlcMeasure::binomial matches the closed form") {
  const ptm::UlcMeasure mu = ptm::UlcMeasure::binomial(3, 0.5);
  CHECK(mu.support_top() == 3);
  CHECK(mu.horizon() == 1.0);
  for (long k = 0; k <= 3; ++k) {
    CHECK(mu.weight(k) ==
          doctest::Approx(oracle::binomial_pmf(3, 0.5, k)).epsilon(1e-13));
  }
  // Representation identity: mu(k) = f(k) * poisson_pmf(T, k).
  for (long k = 0; k <= 3; ++k) {
    CHECK(mu.weight(k) ==
          doctest::Approx(mu.density().value(k) * ptm::poisson_pmf(1.0, k))
              .epsilon(1e-12));
  }
  CHECK(ptm::check_log_concave(mu.density()).passed);
  CHECK_THROWS_AS(ptm::UlcMeasure::binomial(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ptm::UlcMeasure::binomial(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ptm::UlcMeasure::binomial(3, 1.0), std::invalid_argument);
}

TEST_CASE("UlcMeasure::bernoulli covers the degenerate point mass") {
  const ptm::UlcMeasure half = ptm::UlcMeasure::bernoulli(0.5);
  CHECK(half.weight(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half.weight(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half.intensity_bound() == doctest::Approx(1.0).epsilon(1e-14));

  const ptm::UlcMeasure zero = ptm::UlcMeasure::bernoulli(0.0);
  CHECK(zero.support_top() == 0);
  CHECK(zero.weight(0) == 1.0);
  CHECK(zero.intensity_bound() == 0.0);

  CHECK_THROWS_AS(ptm::UlcMeasure::bernoulli(1.0), std::invalid_argument);
  CHECK_THROWS_AS(ptm::UlcMeasure::bernoulli(-0.1), std::invalid_argument);
}

TEST_CASE("from_weights and from_density build the same measure") {
  // f = (2, 1) with horizon 1: weights proportional to (2 e^-1, 1 e^-1).
  const ptm::UlcMeasure a = ptm::UlcMeasure::from_density(ptm::LogConcaveFn({2.0, 1.0}), 1.0);
  CHECK(a.weight(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(a.weight(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(a.intensity_bound() == doctest::Approx(0.5).epsilon(1e-14));

  const ptm::UlcMeasure b = ptm::UlcMeasure::from_weights({2.0 / 3.0, 1.0 / 3.0}, 1.0);
  for (long k = 0; k <= 1; ++k) {
    CHECK(a.weight(k) == doctest::Approx(b.weight(k)).epsilon(1e-14));
  }

  CHECK_THROWS_AS(ptm::UlcMeasure::from_weights(normalized({1.0, 1.0, 3.0}), 1.0),
                  std::invalid_argument);
  // Support must start at zero for the density representation to exist.
  CHECK_THROWS_AS(ptm::UlcMeasure::from_weights({0.0, 1.0}, 1.0),
                  std::invalid_argument);
  // Density construction demands log-concavity up front.
  CHECK_THROWS_AS(ptm::UlcMeasure::from_density(ptm::LogConcaveFn({1.0, 1.0, 3.0}), 1.0),
                  std::invalid_argument);
}

TEST_CASE("serialize and parse round-trip weights exactly") {
  const ptm::UlcMeasure mu = ptm::random_ulc(321, 8);
  const std::string text = mu.serialize();
  const ptm::UlcMeasure back = ptm::UlcMeasure::parse(text);
  CHECK(back.horizon() == mu.horizon());
  CHECK(back.support_top() == mu.support_top());
  for (long k = 0; k <= mu.support_top(); ++k) {
    // 17 significant digits reproduce the double bit for bit.
    CHECK(back.weight(k) == mu.weight(k));
  }

  CHECK_THROWS_AS(ptm::UlcMeasure::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(ptm::UlcMeasure::parse("0 0.5\n1 0.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(ptm::UlcMeasure::parse("T=1\n0 0.5\n2 0.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(ptm::UlcMeasure::parse("T=1\n0 0.5\n1 0.5 junk\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ptm::UlcMeasure::parse("T=1\n0 0.2\n1 0.2\n2 0.6\n"),
                  std::invalid_argument);
}

TEST_CASE("file io distinguishes bad paths from bad content") {
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "ptm_measure_roundtrip.txt";
  const ptm::UlcMeasure mu = ptm::UlcMeasure::binomial(4, 0.3);
  mu.write_file(path.string());
  const ptm::UlcMeasure back = ptm::UlcMeasure::read_file(path.string());
  for (long k = 0; k <= mu.support_top(); ++k) {
    CHECK(back.weight(k) == mu.weight(k));
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ptm::UlcMeasure::read_file("/nonexistent/dir/m.txt"), ptm::IoError);
  CHECK_THROWS_AS(mu.write_file("/nonexistent/dir/m.txt"), ptm::IoError);
}

TEST_CASE("entropy evaluates exactly on two-point examples") {
  const ptm::ProbabilityVector half({0.5, 0.5});
  // g = (1, 3): Ent = (3 log 3)/2 - 2 log 2.
  const double direct = 1.5 * std::log(3.0) - 2.0 * std::log(2.0);
  CHECK(ptm::entropy(half, std::vector<double>{1.0, 3.0}) ==
        doctest::Approx(direct).epsilon(1e-15));
  // g touching zero uses the 0 log 0 = 0 convention.
  CHECK(ptm::entropy(half, std::vector<double>{0.0, 2.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // Constant g has zero entropy.
  CHECK(ptm::entropy(half, std::vector<double>{2.5, 2.5}) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(ptm::entropy(half, std::vector<double>{-1.0, 1.0}),
                  std::domain_error);
}

TEST_CASE("entropy is nonnegative and matches the oracle on random data") {
  ptm::Rng rng(777, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const ptm::UlcMeasure mu = ptm::random_ulc(rng, 8);
    std::vector<double> g(static_cast<std::size_t>(mu.support_top()) + 1);
    for (double& x : g) x = std::exp(rng.next_uniform(-2.0, 2.0));
    const double mine = ptm::entropy(mu.pv(), g);
    std::vector<double> w(g.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = mu.weight(static_cast<long>(k));
    const double ref = oracle::entropy(w, g);
    CHECK(mine == doctest::Approx(ref).epsilon(1e-11));
    CHECK(mine >= -1e-14);
  }
}

TEST_CASE("phi_entropy enforces its domain with a useful message") {
  const ptm::ProbabilityVector half({0.5, 0.5});
  const auto square = [](double u) { return u * u; };
  CHECK(ptm::phi_entropy(half, std::vector<double>{1.0, 3.0}, square, -10.0, 10.0) ==
        doctest::Approx(1.0).epsilon(1e-14));  // 5 - 4
  try {
    ptm::phi_entropy(half, std::vector<double>{1.0, 30.0}, square, -10.0, 10.0);
    FAIL("expected domain_error");
  } catch (const std::domain_error& e) {
    const std::string message = e.what();
    CHECK(message.find("g(1)") != std::string::npos);
  }
}

TEST_CASE("relative entropy is a divergence") {
  const ptm::ProbabilityVector mu({0.5, 0.5});
  CHECK(ptm::relative_entropy(mu, mu) == doctest::Approx(0.0).epsilon(1e-15));
  const ptm::ProbabilityVector skew({0.9, 0.1});
  const double direct = 0.9 * std::log(0.9 / 0.5) + 0.1 * std::log(0.1 / 0.5);
  CHECK(ptm::relative_entropy(skew, mu) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(ptm::relative_entropy(skew, mu) > 0.0);
  // nu must be absolutely continuous with respect to mu.
  CHECK_THROWS_AS(
      ptm::relative_entropy(ptm::ProbabilityVector({0.5, 0.25, 0.25}), mu),
      std::domain_error);

  ptm::Rng rng(31, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const ptm::UlcMeasure base = ptm::random_ulc(rng, 8);
    const ptm::ProbabilityVector nu = ptm::random_tilt(rng, base);
    CHECK(ptm::relative_entropy(nu, base.pv()) >= -1e-13);
  }
}

TEST_CASE("wasserstein1 equals the monotone coupling cost") {
  const ptm::ProbabilityVector d0 = ptm::ProbabilityVector::delta(0);
  const ptm::ProbabilityVector d1 = ptm::ProbabilityVector::delta(1);
  CHECK(ptm::wasserstein1(d0, d1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ptm::wasserstein1(ptm::ProbabilityVector({0.5, 0.5}), d0) ==
        doctest::Approx(0.5).epsilon(1e-15));

  ptm::Rng rng(55, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const ptm::UlcMeasure a = ptm::random_ulc(rng, 6);
    const ptm::ProbabilityVector b = ptm::random_tilt(rng, a);
    const std::size_t len =
        static_cast<std::size_t>(std::max(a.pv().size(), b.size()));
    std::vector<double> wa(len, 0.0);
    std::vector<double> wb(len, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
      wa[k] = a.weight(static_cast<long>(k));
      wb[k] = b.weight(static_cast<long>(k));
    }
    const double mine = ptm::wasserstein1(b, a.pv());
    const double ref = oracle::wasserstein1_coupling(wb, wa);
    CHECK(mine == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("alpha evaluates its closed form and validates arguments") {
  CHECK(ptm::alpha(2.0, 0.0) == 0.0);
  CHECK(ptm::alpha(1.0, 1.0) == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-15));
  // Increasing in r for fixed c.
  CHECK(ptm::alpha(1.5, 2.0) > ptm::alpha(1.5, 1.0));
  CHECK_THROWS_AS(ptm::alpha(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ptm::alpha(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ptm::alpha(1.0, -0.5), std::invalid_argument);
}

TEST_CASE("psi matches the naive Bregman form where that form is stable") {
  CHECK(ptm::psi(3.0, 0.0) == 0.0);
  CHECK(ptm::psi(1.0, 1.0) == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-15));
  for (double u : {0.01, 0.1, 1.0, 7.5, 120.0}) {
    for (double v : {-0.009, -0.001, 0.0, 0.003, 0.5, 2.0}) {
      if (u + v <= 0.0) continue;
      const double w = u + v;
      const double naive = w * std::log(w) - u * std::log(u) - (std::log(u) + 1.0) * v;
      CHECK(ptm::psi(u, v) == doctest::Approx(naive).epsilon(1e-9));
      CHECK(ptm::psi(u, v) >= -1e-15);  // convexity gap
    }
  }
  CHECK_THROWS_AS(ptm::psi(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ptm::psi(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("convolve adds independent draws") {
  const ptm::ProbabilityVector bern({0.5, 0.5});
  const ptm::ProbabilityVector sum = ptm::convolve(bern, bern);
  CHECK(sum.size() == 3);
  CHECK(sum.weight(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sum.weight(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sum.weight(2) == doctest::Approx(0.25).epsilon(1e-15));

  // Poisson additivity within truncation error.
  const ptm::UlcMeasure p1 = ptm::UlcMeasure::poisson(1.0);
  const ptm::UlcMeasure p2 = ptm::UlcMeasure::poisson(2.0);
  const ptm::ProbabilityVector p3 = ptm::convolve(p1.pv(), p2.pv());
  for (long k = 0; k <= 8; ++k) {
    CHECK(p3.weight(k) == doctest::Approx(oracle::poisson_pmf(3.0, k)).epsilon(1e-10));
  }
}

TEST_CASE("make_inequality_report applies the relative tolerance rule") {
  const ptm::InequalityReport ok = ptm::make_inequality_report("x", 1.0, 1.0 + 1e-15, 2.0, 1e-12);
  CHECK(ok.passed);
  CHECK(ok.constant == 2.0);
  const ptm::InequalityReport borderline =
      ptm::make_inequality_report("x", 1.0 + 5e-13, 1.0, 0.0, 1e-12);
  CHECK(borderline.passed);  // within the relative allowance
  const ptm::InequalityReport bad = ptm::make_inequality_report("x", 1.001, 1.0, 0.0, 1e-12);
  CHECK_FALSE(bad.passed);
  CHECK(bad.slack == doctest::Approx(-0.001).epsilon(1e-9));
  const ptm::InequalityReport reported =
      ptm::make_inequality_report("x", 2.0, 1.0, 0.0, 1e-12, false);
  CHECK_FALSE(reported.passed);
  CHECK_FALSE(reported.asserted);
}
