#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dpsk/rates.hpp"
#include "oracles.hpp"

using namespace dpsk;
using namespace dpsk::rates;

namespace {

// Lossless-detector parameter set with a given αη, no dead time.
SystemParams with_alpha_eta(double alpha_eta, double mu) {
  SystemParams p;
  p.mu = mu;
  p.detector.eta = 1.0;
  p.detector.dead_time = 0.0;
  p.channel = {0.0, 0.2, -10.0 * std::log10(alpha_eta)};
  return p;
}

}  // namespace

TEST_CASE("binary entropy values") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0795) == doctest::Approx(0.400).epsilon(1e-3));
  CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
  for (double e = 0.01; e < 1.0; e += 0.037) {
    CHECK(binary_entropy(e) == doctest::Approx(oracle::entropy(e)).epsilon(1e-13));
    CHECK(binary_entropy(e) == doctest::Approx(binary_entropy(1 - e)).epsilon(1e-13));
  }
}

TEST_CASE("binary entropy derivative and concavity") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  const double h = 1e-6;
  for (int i = 0; i < 10; ++i) {
    const double e = u(g);
    const double fd = (binary_entropy(e + h) - binary_entropy(e - h)) / (2 * h);
    const double exact = std::log2((1 - e) / e);
    CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    CHECK(binary_entropy(e) >= 0.5 * (binary_entropy(e - 0.005) + binary_entropy(e + 0.005)));
  }
}

TEST_CASE("collision probability in log space") {
  CHECK(log2_collision_probability(1, 0.0, 0.0, 0.0) == doctest::Approx(-1.0));
  CHECK(log2_collision_probability(100, 0.17, 0.0, 0.0) == doctest::Approx(-66.0));
  CHECK(log2_collision_probability(1000, 0.25, 0.0, 0.25) == 0.0);
  // No overflow for huge keys.
  CHECK(std::isfinite(log2_collision_probability(1'000'000'000'000ULL, 0.1, 0.0, 0.0)));
}

TEST_CASE("tau1 values") {
  CHECK(tau1(0.17, 0.0, 0.0) == doctest::Approx(0.34));
  CHECK(tau1(0.0, 0.3, 0.0) == 0.0);
  CHECK(tau1(0.16, 1e-4, 0.02) == doctest::Approx(0.359968).epsilon(1e-9));
  CHECK(tau1(0.17, 0.0, 0.0795) == doctest::Approx(0.499));
}

TEST_CASE("tau1 is 1 + log2(Pc)/n") {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::uint64_t> n(1, 10'000'000);
  for (int i = 0; i < 10'000; ++i) {
    const double mu = 0.5 * u(g);
    const double ae = u(g);
    const double e = 0.5 * u(g);
    if (2 * mu * (1 - ae) + 2 * e > 1.0) continue;
    const auto n_sif = n(g);
    const double lhs = 1.0 + log2_collision_probability(n_sif, mu, ae, e) / n_sif;
    CHECK(std::abs(lhs - tau1(mu, ae, e)) <= 1e-12);
  }
}

TEST_CASE("sifted rate") {
  auto p = with_alpha_eta(1e-4, 0.16);
  CHECK(sifted_rate(p) == doctest::Approx(0.16e-4 * 1e9));
  p.mu = 1e-12;
  CHECK(sifted_rate(p) == doctest::Approx(1e-12 * 1e-4 * 1e9));

  SystemParams hr;
  hr.mu = 0.1;
  hr.detector = find_preset("high-rate");
  hr.channel.fiber_length = 20.0;
  const double raw = 0.1 * transmittance(hr.channel) * 0.088 * 1e9;
  CHECK(sifted_rate(hr) == doctest::Approx(raw * std::exp(-raw * 50e-9 / 2)));
  CHECK(sifted_rate(hr) == doctest::Approx(1.88e6).epsilon(0.01));
}

TEST_CASE("secure rate examples") {
  const auto p = with_alpha_eta(1e-4, 0.16);
  const auto r = secure_rate(p, 0.0);
  CHECK(r.secure_fraction == doctest::Approx(0.680032).epsilon(1e-6));
  CHECK(r.r_secure == doctest::Approx(1.088e4).epsilon(1e-3));
  CHECK(secure_rate_linear(p) == doctest::Approx(1.088e4).epsilon(1e-3));

  auto q = with_alpha_eta(8.94e-5, 0.17);
  q.detector.dead_time = 50e-9;
  const auto s = secure_rate(q, 0.0795);
  CHECK(s.secure_fraction == doctest::Approx(0.037).epsilon(0.02));
  CHECK(s.r_secure == doctest::Approx(5.6e2).epsilon(0.02));

  CHECK(secure_rate(q, 0.2).r_secure == 0.0);
  CHECK(secure_rate(q, 0.2).secure_fraction < 0.0);
  CHECK_THROWS_AS(secure_rate(q, 0.6), std::domain_error);
}

TEST_CASE("linear form is the small-loss limit") {
  for (double mu : {0.05, 0.1, 0.16, 0.25}) {
    for (double ae : {1e-6, 1e-4, 1e-3}) {
      const auto p = with_alpha_eta(ae, mu);
      const double exact = secure_rate(p, 0.0).r_secure;
      const double lin = secure_rate_linear(p);
      CHECK(std::abs(exact - lin) / lin == doctest::Approx(2 * mu * ae / (1 - 2 * mu)).epsilon(1e-6));
    }
  }
  const auto vertex = with_alpha_eta(1e-4, 0.25);
  CHECK(secure_rate_linear(vertex) == doctest::Approx(1e-4 * 1e9 / 8));
  CHECK(secure_rate_linear(with_alpha_eta(1e-4, 0.5 - 1e-15)) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("secure rate bounded by sifted and monotone") {
  SystemParams p;
  p.detector = find_preset("long-distance");
  for (double L = 0; L <= 120; L += 10) {
    p.channel.fiber_length = L;
    double prev = INFINITY;
    for (double e = 0.0; e <= 0.5; e += 0.01) {
      const auto r = secure_rate(p, e);
      CHECK(r.r_secure <= r.r_sifted);
      CHECK(r.r_secure <= prev);
      prev = r.r_secure;
    }
  }
  double prev = INFINITY;
  for (double L = 0; L <= 150; L += 2.5) {
    p.channel.fiber_length = L;
    const double r = evaluate(p).r_secure;
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("qber model components") {
  SystemParams p;
  p.detector.dark_rate_total = 0.0;
  p.detector.jitter_sigma = 0.0;
  p.detector.jitter_tail_fraction = 0.0;
  p.detector.extinction_ratio_db = 20.0;
  auto q = qber_model(p);
  CHECK(q.e_total == doctest::Approx(1.0 / 101.0));
  CHECK(q.e_total == doctest::Approx(0.0099).epsilon(0.01));
  CHECK(q.e_dark == 0.0);
  CHECK(q.e_jitter == 0.0);

  p.detector.extinction_ratio_db = 300.0;
  CHECK(qber_model(p).e_total == doctest::Approx(0.0).epsilon(1e-25));

  // Dark counts alone, signal off: half the clicks are wrong.
  p.detector.dark_rate_total = 1e4;
  p.channel.excess_loss = 400.0;
  CHECK(qber_model(p).e_dark == doctest::Approx(0.5));

  // Sum invariant.
  SystemParams ld;
  ld.detector = find_preset("long-distance");
  ld.channel.fiber_length = 80.0;
  q = qber_model(ld);
  CHECK(q.e_total == doctest::Approx(q.e_extinction + q.e_dark + q.e_jitter));
  CHECK(q.dark_accepted_rate == doctest::Approx(2.7e3 * 0.2e-9 * 1e9));
}

TEST_CASE("calibrated jitter reproduces the 105 km budget") {
  SystemParams p;
  p.detector = find_preset("long-distance");
  p.channel.fiber_length = 105.0;
  p.mu = 0.17;
  const auto q = qber_model(p);
  CHECK(q.e_total == doctest::Approx(0.0795).epsilon(1e-5));
  CHECK(q.e_dark == doctest::Approx(0.055).epsilon(1e-5));

  const auto cal = calibrate_jitter(p, 0.0795, 0.055);
  CHECK(cal.sigma == doctest::Approx(p.detector.jitter_sigma).epsilon(1e-6));
  CHECK(cal.tail_fraction == doctest::Approx(p.detector.jitter_tail_fraction).epsilon(1e-6));

  CHECK_THROWS_AS(calibrate_jitter(p, 0.0795, 0.3), std::runtime_error);
}
