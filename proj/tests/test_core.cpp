#include <doctest.h>

#include <cmath>
#include <random>

#include "otto/core.hpp"
#include "otto/errors.hpp"

using namespace otto;

TEST_CASE("bath pair") {
  const BathPair b(5.0, 2.0);
  CHECK(b.beta_hot() == doctest::Approx(0.2));
  CHECK(b.beta_cold() == doctest::Approx(0.5));
  CHECK(b.carnot_efficiency() == doctest::Approx(0.6));
  CHECK_THROWS_AS(BathPair(2.0, 5.0), DomainError);
  CHECK_THROWS_AS(BathPair(2.0, 2.0), DomainError);
  CHECK_THROWS_AS(BathPair(2.0, 0.0), DomainError);
}

TEST_CASE("cycle power") {
  const QuasistaticCycle qc{0.2, 0.5, 0.4};
  CHECK(cycle_power(qc, 0.0, 0.0, 1.0, 1.0) == doctest::Approx(0.1));
  CHECK(cycle_power(qc, 0.12, 0.08, 1.0, 3.0) == doctest::Approx(0.0));
  CHECK(cycle_power(qc, 0.3, 0.0, 1.0, 1.0) < 0.0);
  CHECK_THROWS_AS(cycle_power(qc, 0.0, 0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(cycle_power(qc, 0.0, 0.0, 1.0, -1.0), DomainError);
}

TEST_CASE("cycle efficiency") {
  const QuasistaticCycle qc{0.2, 0.5, 0.4};
  CHECK(cycle_efficiency(qc, 0.0, 0.0) == doctest::Approx(qc.eta_adi));
  CHECK(cycle_efficiency(qc, 0.2, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(cycle_efficiency(qc, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(cycle_efficiency(qc, 0.0, 0.7), DomainError);
}

TEST_CASE("efficiency never exceeds the quasi-static value") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double q = 0.1 + u(rng);
    const double w = q * (0.05 + 0.9 * u(rng));
    const QuasistaticCycle qc{w, q, w / q};
    const double w1 = 2.0 * w * u(rng);
    const double w3 = 0.99 * q * u(rng);
    const double eta = cycle_efficiency(qc, w1, w3);
    CHECK(eta <= qc.eta_adi + 1e-15);
  }
}

TEST_CASE("energy and time rescaling") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int k = 0; k < 200; ++k) {
    const QuasistaticCycle qc{0.3, 0.7, 0.3 / 0.7};
    const double w1 = 0.1 * u(rng), w3 = 0.1 * u(rng), t1 = 5 * u(rng), t3 = 5 * u(rng);
    const double scale = 10 * u(rng);
    const QuasistaticCycle scaled{0.3 * scale, 0.7 * scale, qc.eta_adi};
    CHECK(cycle_efficiency(scaled, scale * w1, scale * w3) ==
          doctest::Approx(cycle_efficiency(qc, w1, w3)).epsilon(1e-12));
    CHECK(cycle_power(scaled, scale * w1, scale * w3, t1, t3) ==
          doctest::Approx(scale * cycle_power(qc, w1, w3, t1, t3)).epsilon(1e-12));
    CHECK(cycle_power(qc, w1, w3, scale * t1, scale * t3) ==
          doctest::Approx(cycle_power(qc, w1, w3, t1, t3) / scale).epsilon(1e-12));
  }
}

TEST_CASE("efficiency decreases with either extra work") {
  const QuasistaticCycle qc{0.3, 0.7, 0.3 / 0.7};
  double prev = cycle_efficiency(qc, 0.0, 0.1);
  for (int i = 1; i <= 20; ++i) {
    const double eta = cycle_efficiency(qc, 0.01 * i, 0.1);
    CHECK(eta < prev);
    prev = eta;
  }
  prev = cycle_efficiency(qc, 0.1, 0.0);
  for (int i = 1; i <= 20; ++i) {
    const double eta = cycle_efficiency(qc, 0.1, 0.01 * i);
    CHECK(eta < prev);
    prev = eta;
  }
}

TEST_CASE("mean-only efficiency at maximum power") {
  CHECK(emp_mean_only(0.5, 1.0, 1.0) == doctest::Approx(1.0 / 2.75).epsilon(1e-14));
  CHECK(emp_mean_only(1e-9, 1.0, 3.0) < 1e-8);
  CHECK(emp_mean_only(0.4, 2.0, 5.0) == doctest::Approx(emp_mean_only(0.4, 20.0, 50.0)));
  CHECK_THROWS_AS(emp_mean_only(0.5, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(emp_mean_only(0.5, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(emp_mean_only(1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("EMP formula is the optimum of the mean-only power") {
  // Oracle: brute-force maximization of (W - S1/t1^2 - S3/t3^2)/(t1+t3).
  const double w = 0.3, q = 0.6, s1 = 0.2, s3 = 0.7;
  const QuasistaticCycle qc{w, q, w / q};
  double best_p = -1, best_eta = 0, t1 = 1, t3 = 1;
  for (double step : {0.05, 0.002, 0.0001}) {
    const double c1 = t1, c3 = t3;
    for (int i = -60; i <= 60; ++i) {
      for (int j = -60; j <= 60; ++j) {
        const double a = c1 + i * step, b = c3 + j * step;
        if (a <= 0 || b <= 0) continue;
        const double p = cycle_power(qc, s1 / (a * a), s3 / (b * b), a, b);
        if (p > best_p) {
          best_p = p;
          best_eta = cycle_efficiency(qc, s1 / (a * a), s3 / (b * b));
          t1 = a;
          t3 = b;
        }
      }
    }
  }
  CHECK(best_eta == doctest::Approx(emp_mean_only(qc.eta_adi, s1, s3)).epsilon(1e-5));
}
