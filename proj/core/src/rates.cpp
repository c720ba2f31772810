#include "dpsk/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace dpsk::rates {

double binary_entropy(double e) {
  if (!(e >= 0.0 && e <= 1.0)) throw std::domain_error("binary_entropy: e outside [0, 1]");
  if (e == 0.0 || e == 1.0) return 0.0;
  return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

double collision_exponent(double mu, double alpha_eta, double e) {
  return std::clamp(1.0 - 2.0 * mu * (1.0 - alpha_eta) - 2.0 * e, 0.0, 1.0);
}

double log2_collision_probability(std::uint64_t n_sif, double mu, double alpha_eta, double e) {
  return -static_cast<double>(n_sif) * collision_exponent(mu, alpha_eta, e);
}

double tau1(double mu, double alpha_eta, double e) {
  return std::clamp(2.0 * mu * (1.0 - alpha_eta) + 2.0 * e, 0.0, 1.0);
}

double secure_fraction(double mu, double alpha_eta, double e, const EcEfficiency& f) {
  return 1.0 - 2.0 * mu * (1.0 - alpha_eta) - 2.0 * e - f(e) * binary_entropy(e);
}

double sifted_rate(const SystemParams& p) {
  const double detected = p.mu * system_transmittance(p) * p.clock;
  return detected * std::exp(-detected * p.detector.dead_time / 2.0);
}

double secure_key_rate(double r_sifted, double mu, double alpha_eta, double e,
                       const EcEfficiency& f) {
  return std::max(0.0, r_sifted * secure_fraction(mu, alpha_eta, e, f));
}

RatePoint secure_rate(const SystemParams& p, double e) {
  if (!(e >= 0.0 && e <= 0.5)) throw std::domain_error("secure_rate: e outside [0, 0.5]");
  RatePoint r;
  r.length_km = p.channel.fiber_length;
  r.alpha = transmittance(p.channel);
  r.mu = p.mu;
  r.alpha_eta = r.alpha * p.detector.eta;
  r.r_sifted = sifted_rate(p);
  r.qber = e;
  r.tau1 = tau1(p.mu, r.alpha_eta, e);
  r.secure_fraction = secure_fraction(p.mu, r.alpha_eta, e, p.ec_efficiency);
  r.r_secure = std::max(0.0, r.r_sifted * r.secure_fraction);
  return r;
}

double secure_rate_linear(const SystemParams& p) {
  return p.mu * system_transmittance(p) * p.clock * (1.0 - 2.0 * p.mu);
}

QberBreakdown qber_model(const SystemParams& p) { return qber_model(p, gate_acceptance(p)); }

QberBreakdown qber_model(const SystemParams& p, const GateAcceptance& acceptance) {
  const double signal = p.mu * system_transmittance(p) * p.clock;
  QberBreakdown q;
  q.signal_own_rate = signal * acceptance.own;
  q.signal_displaced_rate = signal * acceptance.displaced;
  q.dark_accepted_rate = p.detector.dark_rate_total * p.detector.gate_width * p.clock;

  const double accepted = q.accepted_rate();
  if (accepted <= 0.0) return q;
  // Only correctly slotted signal clicks can be misrouted into an error;
  // dark and displaced clicks carry an unrelated bit and err half the time.
  const double misroute = 1.0 / (1.0 + std::pow(10.0, p.detector.extinction_ratio_db / 10.0));
  q.e_extinction = misroute * q.signal_own_rate / accepted;
  q.e_dark = 0.5 * q.dark_accepted_rate / accepted;
  q.e_jitter = 0.5 * q.signal_displaced_rate / accepted;
  q.e_total = q.e_extinction + q.e_dark + q.e_jitter;
  return q;
}

RatePoint evaluate(const SystemParams& p) { return evaluate(p, gate_acceptance(p)); }

RatePoint evaluate(const SystemParams& p, const GateAcceptance& acceptance) {
  return secure_rate(p, qber_model(p, acceptance).e_total);
}

namespace {

// Root of a monotone-ish function on [lo, hi]; throws if no sign change.
template <class F>
double bracketed_root(F f, double lo, double hi, const char* what) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw std::runtime_error(std::string("calibrate_jitter: ") + what + " target unreachable");
  }
  boost::math::tools::eps_tolerance<double> tol(48);
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

}  // namespace

JitterCalibration calibrate_jitter(const SystemParams& p, double target_total,
                                   double target_dark) {
  SystemParams work = p;
  const double sigma_max = p.slot_period();

  // For a given tail weight, σ sets the gate loss and hence the dark share.
  auto sigma_for = [&](double tail_fraction) {
    work.detector.jitter_tail_fraction = tail_fraction;
    return bracketed_root(
        [&](double sigma) {
          work.detector.jitter_sigma = sigma;
          return qber_model(work).e_dark - target_dark;
        },
        0.0, sigma_max, "dark");
  };
  // Heavy tails alone can push the dark share past the target even at σ = 0;
  // shrink the upper bracket until a σ exists.
  double tail_hi = 1.0;
  for (;; tail_hi *= 0.5) {
    try {
      sigma_for(tail_hi);
      break;
    } catch (const std::runtime_error&) {
      if (tail_hi < 1e-6) throw;
    }
  }
  // The tail weight then sets the displaced share and hence the total.
  const double tail = bracketed_root(
      [&](double tail_fraction) {
        work.detector.jitter_sigma = sigma_for(tail_fraction);
        return qber_model(work).e_total - target_total;
      },
      0.0, tail_hi, "total");

  JitterCalibration cal;
  cal.tail_fraction = tail;
  cal.sigma = sigma_for(tail);
  work.detector.jitter_sigma = cal.sigma;
  cal.breakdown = qber_model(work);
  return cal;
}

}  // namespace dpsk::rates
