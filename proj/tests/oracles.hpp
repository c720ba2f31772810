#pragma once

// Reference values computed the slow, obvious way. Nothing here calls into
// the library, so a shared bug cannot make both sides agree.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace oracle {

// dB loss straight from the definition.
inline double transmittance(double length_km, double db_per_km, double excess_db) {
  double a = 1.0;
  const double per_km = std::pow(10.0, -db_per_km / 10.0);
  // Whole kilometres multiply; the remainder is done once.
  const auto whole = static_cast<long>(length_km);
  for (long i = 0; i < whole; ++i) a *= per_km;
  a *= std::pow(10.0, -db_per_km * (length_km - whole) / 10.0);
  return a * std::pow(10.0, -excess_db / 10.0);
}

inline double entropy(double e) {
  if (e <= 0.0 || e >= 1.0) return 0.0;
  return -(e * std::log(e) + (1 - e) * std::log(1 - e)) / std::numbers::ln2;
}

inline double poisson_pmf(int n, double mean) {
  double p = std::exp(-mean);
  for (int k = 1; k <= n; ++k) p *= mean / k;
  return p;
}

// P(n ≥ k) by summing the tail term by term.
inline double poisson_tail(int k, double mean) {
  double s = 0.0;
  for (int n = k; n < k + 400; ++n) s += poisson_pmf(n, mean);
  return s;
}

// ∫ over a uniform pulse of a Gaussian window probability, from the closed
// antiderivative G(x) = xΦ(x/σ) + σφ(x/σ) of Φ(x/σ).
inline double gaussian_window(double sigma, double width, double lo, double hi) {
  auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi); };
  auto G = [&](double x) { return x * Phi(x / sigma) + sigma * phi(x / sigma); };
  const double a = -0.5 * width;
  const double b = 0.5 * width;
  // ∫_a^b [Φ((hi−u)/σ) − Φ((lo−u)/σ)] du = [G(hi−a) − G(hi−b)] − [G(lo−a) − G(lo−b)]
  return ((G(hi - a) - G(hi - b)) - (G(lo - a) - G(lo - b))) / width;
}

// Monte Carlo estimate of the same window for the Gaussian + exponential tail.
inline double sampled_window(double sigma, double tail_fraction, double tail_tau, double width,
                             double lo, double hi, int n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> normal(0.0, sigma > 0 ? sigma : 1.0);
  std::exponential_distribution<double> expo(tail_tau > 0 ? 1.0 / tail_tau : 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    double t = (sigma > 0 ? normal(g) : 0.0) + width * (unit(g) - 0.5);
    if (unit(g) < tail_fraction && tail_tau > 0) t += expo(g);
    inside += (t >= lo && t <= hi) ? 1 : 0;
  }
  return static_cast<double>(inside) / n;
}

}  // namespace oracle
