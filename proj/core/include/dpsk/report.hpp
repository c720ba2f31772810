#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>

#include "dpsk/adversary.hpp"
#include "dpsk/params.hpp"
#include "dpsk/rates.hpp"
#include "dpsk/simulate.hpp"

// Output schemas. Floats are printed with 6 significant digits; rates in
// bit/s, lengths in km, probabilities as decimals. Every document starts with
// provenance: tool version, config hash and seed.
//
//   rate curve CSV (dpsk.rate-curve/1):
//     length_km,alpha,mu,r_sifted,qber,tau1,secure_fraction,r_secure
//   timing histogram CSV (dpsk.histogram/1):
//     offset_ns,count
//   trial JSON (dpsk.trials/1), attack JSON (dpsk.attack/1): see README.
namespace dpsk::report {

inline constexpr const char* kToolVersion = "1.0.0";

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

/// printf("%.6g") without locale surprises.
std::string fmt6(double value);

/// "# tool=dpskqkd version=1.0.0 schema=... config_hash=... seed=..."
std::string provenance_line(const Provenance& prov, const std::string& schema);

void write_rate_curve_csv(std::ostream& out, std::span<const rates::RatePoint> points,
                          const Provenance& prov);
void write_histogram_csv(std::ostream& out, const sim::Histogram& hist,
                         const Provenance& prov);

/// Bit strings are packed MSB-first into hex.
std::string bits_to_hex(std::span<const std::uint8_t> bits);

std::string trials_json(std::span<const sim::TrialResult> trials,
                        const sim::TrialSummary& summary, const SystemParams& p,
                        const Provenance& prov);
/// `extra` fields are appended after the report (hybrid adds its bound here).
std::string attack_json(const eve::AttackReport& report, const SystemParams& p,
                        const Provenance& prov,
                        std::span<const std::pair<std::string, double>> extra = {});
std::string rate_point_json(const rates::RatePoint& point);

// Small single-result documents (dpsk.optimum/1, dpsk.calibration/1,
// dpsk.max-distance/1).
std::string optimum_json(double mu_star, const rates::RatePoint& point, const Provenance& prov);
std::string calibration_json(const rates::JitterCalibration& cal, const Provenance& prov);
std::string max_distance_json(double length_km, const Provenance& prov);

}  // namespace dpsk::report
