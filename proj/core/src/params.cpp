#include "dpsk/params.hpp"

#include <cmath>

namespace dpsk {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(ConfigError::Kind::Validation, field, what);
}

bool finite(double x) { return std::isfinite(x); }

// SPCM timing jitter shared by both up-conversion operating points; fitted by
// rates::calibrate_jitter to the 105 km error budget (7.95 % total, 5.5 %
// dark) with the tail time constant fixed at 0.5 ns.
constexpr double kSpcmJitterSigma = 2.58197255e-10;
constexpr double kSpcmTailFraction = 0.137372939;
constexpr double kSpcmTailTau = 5e-10;

}  // namespace

double EcEfficiency::operator()(double e) const {
  if (table.empty()) return constant;
  for (const auto& [upper, f] : table) {
    if (e <= upper) return f;
  }
  return table.back().second;
}

double transmittance(const ChannelParams& channel) {
  const double loss_db = channel.fiber_length * channel.loss_coeff + channel.excess_loss;
  return std::pow(10.0, -loss_db / 10.0);
}

double system_transmittance(const SystemParams& p) {
  return transmittance(p.channel) * p.detector.eta;
}

const std::vector<NamedPreset>& builtin_presets() {
  static const std::vector<NamedPreset> presets = {
      {"high-rate",
       DetectorPreset{.eta = 0.088,
                      .dark_rate_total = 26e3,
                      .dead_time = 50e-9,
                      .jitter_sigma = kSpcmJitterSigma,
                      .jitter_tail_fraction = kSpcmTailFraction,
                      .jitter_tail_tau = kSpcmTailTau,
                      .gate_width = 0.6e-9,
                      .extinction_ratio_db = 20.0}},
      {"long-distance",
       DetectorPreset{.eta = 0.020,
                      .dark_rate_total = 2.7e3,
                      .dead_time = 50e-9,
                      .jitter_sigma = kSpcmJitterSigma,
                      .jitter_tail_fraction = kSpcmTailFraction,
                      .jitter_tail_tau = kSpcmTailTau,
                      .gate_width = 0.2e-9,
                      .extinction_ratio_db = 20.0}},
      // Raman noise removed (two SPCMs at their ~50 Hz intrinsic dark rate),
      // jitter negligible, peak up-conversion efficiency. Negligible jitter
      // lets the gate shrink to the 100 ps pulse without losing signal.
      {"ideal-projection",
       DetectorPreset{.eta = 0.37,
                      .dark_rate_total = 100.0,
                      .dead_time = 50e-9,
                      .jitter_sigma = 0.0,
                      .jitter_tail_fraction = 0.0,
                      .jitter_tail_tau = 0.0,
                      .gate_width = 0.1e-9,
                      .extinction_ratio_db = 20.0}},
  };
  return presets;
}

DetectorPreset default_detector() { return find_preset("high-rate"); }

const DetectorPreset& find_preset(const std::string& name) {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return p.preset;
  }
  throw ConfigError(ConfigError::Kind::Validation, "preset", "unknown preset '" + name + "'");
}

void validate(const ChannelParams& c) {
  require(finite(c.fiber_length) && c.fiber_length >= 0, "fiber_length", "must be >= 0");
  require(finite(c.loss_coeff) && c.loss_coeff >= 0, "loss_coeff", "must be >= 0");
  require(finite(c.excess_loss) && c.excess_loss >= 0, "excess_loss", "must be >= 0");
}

void validate(const DetectorPreset& d) {
  require(finite(d.eta) && d.eta >= 0 && d.eta <= 1, "eta", "must be in [0, 1]");
  require(finite(d.dark_rate_total) && d.dark_rate_total >= 0, "dark_rate_total",
          "must be >= 0");
  require(finite(d.dead_time) && d.dead_time >= 0, "dead_time", "must be >= 0");
  require(finite(d.jitter_sigma) && d.jitter_sigma >= 0, "jitter_sigma", "must be >= 0");
  require(finite(d.jitter_tail_fraction) && d.jitter_tail_fraction >= 0 &&
              d.jitter_tail_fraction <= 1,
          "jitter_tail_fraction", "must be in [0, 1]");
  require(finite(d.jitter_tail_tau) && d.jitter_tail_tau >= 0, "jitter_tail_tau",
          "must be >= 0");
  require(finite(d.gate_width) && d.gate_width > 0, "gate_width", "must be > 0");
  require(finite(d.extinction_ratio_db) && d.extinction_ratio_db > 0, "extinction_ratio_db",
          "must be > 0");
}

void validate(const DetectorPreset& d, double clock) {
  validate(d);
  require(d.gate_width <= 1.0 / clock * (1.0 + 1e-12), "gate_width",
          "must not exceed the slot period 1/clock");
}

void validate(const EcEfficiency& ec) {
  require(finite(ec.constant) && ec.constant >= 1.0, "ec_efficiency", "must be >= 1");
  double prev = -1.0;
  for (const auto& [upper, f] : ec.table) {
    require(finite(upper) && upper > prev && upper <= 0.5, "ec_table",
            "bounds must increase within (0, 0.5]");
    require(finite(f) && f >= 1.0, "ec_table", "f(e) must be >= 1");
    prev = upper;
  }
}

void validate(const SystemParams& p) {
  require(finite(p.mu) && p.mu > 0 && p.mu < 1, "mu", "must be in (0, 1)");
  require(finite(p.clock) && p.clock > 0, "clock", "must be > 0");
  require(finite(p.pulse_width) && p.pulse_width >= 0 && p.pulse_width < 1.0 / p.clock,
          "pulse_width", "must be in [0, 1/clock)");
  validate(p.channel);
  validate(p.detector, p.clock);
  validate(p.ec_efficiency);
}

}  // namespace dpsk
