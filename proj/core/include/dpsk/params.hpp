#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpsk {

/// Raised for malformed configuration documents and invariant violations.
/// `field()` names the offending key (empty when the document itself is unreadable).
class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Parse, Validation };

  ConfigError(Kind kind, std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        kind_(kind),
        field_(std::move(field)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  Kind kind_;
  std::string field_;
};

struct ChannelParams {
  double fiber_length = 0.0;  // km
  double loss_coeff = 0.2;    // dB/km
  double excess_loss = 2.5;   // dB, interferometer insertion plus fixed coupling

  bool operator==(const ChannelParams&) const = default;
};

/// One detector operating point. Rates are totals over both detectors and
/// precede time gating; times are in seconds.
///
/// Timing jitter is a Gaussian core of width `jitter_sigma`; a fraction
/// `jitter_tail_fraction` of clicks is additionally delayed by an
/// exponential with mean `jitter_tail_tau` (the late diffusion tail of a
/// Si SPCM). With tail_fraction = 0 the jitter is purely Gaussian.
struct DetectorPreset {
  double eta = 0.0;
  double dark_rate_total = 0.0;  // Hz
  double dead_time = 0.0;
  double jitter_sigma = 0.0;
  double jitter_tail_fraction = 0.0;
  double jitter_tail_tau = 0.0;
  double gate_width = 1e-9;
  double extinction_ratio_db = 20.0;

  bool operator==(const DetectorPreset&) const = default;
};

/// Error-correction inefficiency f(e). Either a constant, or a
/// piecewise-constant table of (upper e bound, f) steps sorted by bound;
/// e above the last bound uses the last f.
struct EcEfficiency {
  double constant = 1.16;
  std::vector<std::pair<double, double>> table;

  double operator()(double e) const;
  bool operator==(const EcEfficiency&) const = default;
};

/// The "high-rate" preset; what an unconfigured system starts from.
DetectorPreset default_detector();

struct SystemParams {
  double mu = 0.17;
  double clock = 1e9;          // Hz
  double pulse_width = 1e-10;  // s
  ChannelParams channel;
  DetectorPreset detector = default_detector();
  EcEfficiency ec_efficiency;

  double slot_period() const { return 1.0 / clock; }
  bool operator==(const SystemParams&) const = default;
};

/// Channel transmittance α = 10^(−(L·c + excess)/10).
double transmittance(const ChannelParams& channel);

/// α·η for the full parameter set.
double system_transmittance(const SystemParams& p);

struct NamedPreset {
  std::string name;
  DetectorPreset preset;
};

/// "high-rate", "long-distance" and "ideal-projection".
const std::vector<NamedPreset>& builtin_presets();

/// Throws ConfigError(Validation) when `name` is not a builtin preset.
const DetectorPreset& find_preset(const std::string& name);

// Validators throw ConfigError(Validation) naming the first bad field.
void validate(const ChannelParams& channel);
void validate(const DetectorPreset& detector);
// `clock` is needed to check the gate against the slot period.
void validate(const DetectorPreset& detector, double clock);
void validate(const EcEfficiency& ec);
void validate(const SystemParams& p);

}  // namespace dpsk
