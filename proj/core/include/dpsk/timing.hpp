#pragma once

#include "dpsk/params.hpp"

namespace dpsk {

/// Detector timing offset J relative to the nominal arrival instant.
/// With probability 1 − tail_fraction, J ~ N(0, σ²); otherwise
/// J ~ N(0, σ²) + Exp(mean tail_tau). σ = 0 or τ = 0 degenerate cleanly.
struct JitterModel {
  double sigma = 0.0;
  double tail_fraction = 0.0;
  double tail_tau = 0.0;

  static JitterModel of(const DetectorPreset& detector);

  double cdf(double x) const;
};

/// Standard normal CDF.
double normal_cdf(double z);

/// P(lo ≤ J + U ≤ hi) with U uniform on [−pulse_width/2, pulse_width/2]
/// (emission instant within the pulse envelope).
double window_probability(const JitterModel& jitter, double pulse_width,
                          double lo, double hi);

/// Fractions of signal clicks, per emitting slot, landing in its own gate
/// and in any other slot's gate.
struct GateAcceptance {
  double own = 0.0;
  double displaced = 0.0;
};

GateAcceptance gate_acceptance(const SystemParams& p);

}  // namespace dpsk
