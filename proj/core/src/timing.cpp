#include "dpsk/timing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace dpsk {

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Mills ratio Φ(−t)/φ(t) for t ≥ 0.
double mills_ratio(double t) {
  if (t < 8.0) return 0.5 * std::erfc(t / std::numbers::sqrt2) / normal_pdf(t);
  // Laplace continued fraction, converges quickly for large t.
  double frac = t;
  for (int k = 60; k >= 1; --k) frac = t + k / frac;
  return 1.0 / frac;
}

// CDF of N(0, σ²) + Exp(mean τ).
double exgauss_cdf(double x, double sigma, double tau) {
  if (tau == 0.0) {
    if (sigma == 0.0) return x >= 0.0 ? 1.0 : 0.0;
    return normal_cdf(x / sigma);
  }
  if (sigma == 0.0) return x < 0.0 ? 0.0 : -std::expm1(-x / tau);
  const double z = x / sigma;
  const double b = z - sigma / tau;
  // exp(−x/τ + σ²/2τ²)·Φ(b) rewritten as φ(z)·M(−b) when b ≤ 0 to avoid overflow.
  const double correction =
      b <= 0.0 ? normal_pdf(z) * mills_ratio(-b)
               : std::exp(-x / tau + 0.5 * (sigma / tau) * (sigma / tau)) * normal_cdf(b);
  return std::clamp(normal_cdf(z) - correction, 0.0, 1.0);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

JitterModel JitterModel::of(const DetectorPreset& d) {
  return {d.jitter_sigma, d.jitter_tail_fraction, d.jitter_tail_tau};
}

double JitterModel::cdf(double x) const {
  const double core = exgauss_cdf(x, sigma, 0.0);
  if (tail_fraction == 0.0) return core;
  return (1.0 - tail_fraction) * core + tail_fraction * exgauss_cdf(x, sigma, tail_tau);
}

double window_probability(const JitterModel& jitter, double pulse_width, double lo,
                          double hi) {
  if (hi <= lo) return 0.0;
  if (pulse_width == 0.0) return jitter.cdf(hi) - jitter.cdf(lo);

  const double a = -0.5 * pulse_width;
  const double b = 0.5 * pulse_width;
  auto integrand = [&](double u) { return jitter.cdf(hi - u) - jitter.cdf(lo - u); };

  // The integrand kinks (or jumps, for σ = 0) where u crosses lo or hi; panel
  // edges are placed there so each panel is smooth.
  std::vector<double> edges{a, b};
  for (double k : {lo, hi}) {
    if (k > a && k < b) edges.push_back(k);
  }
  std::sort(edges.begin(), edges.end());

  // Smooth integrands (jitter wide against the pulse) need few panels.
  const int panels =
      jitter.sigma == 0.0
          ? 4
          : std::clamp(static_cast<int>(std::ceil(4.0 * pulse_width / jitter.sigma)), 2, 32);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double width = (edges[i + 1] - edges[i]) / panels;
    for (int j = 0; j < panels; ++j) {
      const double x0 = edges[i] + j * width;
      total += boost::math::quadrature::gauss<double, 20>::integrate(integrand, x0, x0 + width);
    }
  }
  return std::clamp(total / pulse_width, 0.0, 1.0);
}

GateAcceptance gate_acceptance(const SystemParams& p) {
  const auto jitter = JitterModel::of(p.detector);
  const double slot = p.slot_period();
  const double half = 0.5 * p.detector.gate_width;

  GateAcceptance acc;
  acc.own = window_probability(jitter, p.pulse_width, -half, half);

  // Neighbouring gates until both sides are negligible. The Gaussian core is
  // symmetric; the exponential tail only reaches later gates.
  const double reach = 12.0 * jitter.sigma + p.pulse_width + 50.0 * jitter.tail_tau;
  for (long k = 1; k < 100000; ++k) {
    const double shift = static_cast<double>(k) * slot;
    const double late = window_probability(jitter, p.pulse_width, shift - half, shift + half);
    const double early =
        window_probability(jitter, p.pulse_width, -shift - half, -shift + half);
    acc.displaced += late + early;
    if (shift - half > reach || (late + early < 1e-17 && shift > 12.0 * jitter.sigma)) break;
  }
  return acc;
}

}  // namespace dpsk
