#pragma once

#include <cstdint>

#include "dpsk/params.hpp"
#include "dpsk/timing.hpp"

/// Analytic DPSK key-rate model.
///
/// Eve's per-bit knowledge under the hybrid beamsplitting + intercept-resend
/// attack is 2μ(1−αη) + 2e. The collision probability of an n-bit sifted key
/// is P_c = 2^{−n(1 − 2μ(1−αη) − 2e)}, privacy amplification compresses by
/// τ₁ = 1 + log₂(P_c)/n, and the secure rate is
///
///   R_s = R_ng · [1 − τ₁ − f(e)·h(e)],  R_ng = μαη f_c exp(−μαη f_c t_d / 2).
namespace dpsk::rates {

struct RatePoint {
  double length_km = 0.0;
  double alpha = 0.0;
  double mu = 0.0;
  double alpha_eta = 0.0;
  double r_sifted = 0.0;  // bit/s
  double qber = 0.0;
  double tau1 = 0.0;
  double secure_fraction = 0.0;  // unclamped bracket
  double r_secure = 0.0;         // bit/s, clamped at 0
};

struct QberBreakdown {
  double e_extinction = 0.0;
  double e_dark = 0.0;
  double e_jitter = 0.0;
  double e_total = 0.0;
  // Accepted click rates (1/s) before dead time, for cross-checks.
  double signal_own_rate = 0.0;
  double signal_displaced_rate = 0.0;
  double dark_accepted_rate = 0.0;

  double accepted_rate() const {
    return signal_own_rate + signal_displaced_rate + dark_accepted_rate;
  }
};

/// h(e) = −e log₂ e − (1−e) log₂(1−e); throws std::domain_error outside [0, 1].
double binary_entropy(double e);

/// Per-bit collision exponent 1 − 2μ(1−αη) − 2e, clamped to [0, 1].
double collision_exponent(double mu, double alpha_eta, double e);

/// log₂ P_c for an n_sif-bit sifted key (P_c itself underflows).
double log2_collision_probability(std::uint64_t n_sif, double mu, double alpha_eta,
                                  double e);

/// Privacy amplification compression τ₁ = 2μ(1−αη) + 2e, clamped to [0, 1].
double tau1(double mu, double alpha_eta, double e);

/// 1 − 2μ(1−αη) − 2e − f(e)·h(e), not clamped.
double secure_fraction(double mu, double alpha_eta, double e, const EcEfficiency& f);

double sifted_rate(const SystemParams& p);

/// Secure rate from a given sifted rate and QBER, e.g. measured ones.
double secure_key_rate(double r_sifted, double mu, double alpha_eta, double e,
                       const EcEfficiency& f);

/// Full rate point at error rate `e` (0 ≤ e ≤ 0.5).
RatePoint secure_rate(const SystemParams& p, double e);

/// Small-loss, error-free approximation μαη f_c (1 − 2μ).
double secure_rate_linear(const SystemParams& p);

QberBreakdown qber_model(const SystemParams& p);
/// Same, reusing a gate acceptance computed for p's detector, pulse and clock
/// (it does not depend on μ or the channel).
QberBreakdown qber_model(const SystemParams& p, const GateAcceptance& acceptance);

/// secure_rate at the modeled QBER.
RatePoint evaluate(const SystemParams& p);
RatePoint evaluate(const SystemParams& p, const GateAcceptance& acceptance);

/// Jitter calibration: solves jitter_sigma and jitter_tail_fraction (tail
/// τ held at `p.detector.jitter_tail_tau`) so that qber_model(p) hits both
/// targets. Throws std::runtime_error when the targets are unreachable.
struct JitterCalibration {
  double sigma = 0.0;
  double tail_fraction = 0.0;
  QberBreakdown breakdown;
};

JitterCalibration calibrate_jitter(const SystemParams& p, double target_total,
                                   double target_dark);

}  // namespace dpsk::rates
