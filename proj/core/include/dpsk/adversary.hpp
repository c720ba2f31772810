#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

/// Eavesdropper models against DPSK.
///
/// Eve replaces the lossy fiber with a lossless one and Bob's detectors'
/// inefficiency with her own tap, so everything αη throws away is hers.
/// The accounting follows the hybrid attack: beamsplitting yields full
/// information on 2μ(1−αη) of the sifted bits, and intercept-resend, kept
/// below the innocent error rate e, on another 2e.
namespace dpsk::eve {

enum class AttackKind { BS, IR, PNS2, HYBRID };

std::string to_string(AttackKind kind);
AttackKind parse_attack_kind(const std::string& name);  // "bs", "ir", "pns2", "hybrid"

struct AttackConfig {
  AttackKind kind = AttackKind::HYBRID;
  double ir_fraction = 0.0;
  unsigned pns_block = 2;
  unsigned coherence_pulses = 100;  // N, pulses within the source coherence time
};

void validate(const AttackConfig& config);

struct AttackReport {
  AttackKind kind = AttackKind::BS;
  std::uint64_t samples = 0;         // sifted bits (or attacked blocks for PNS)
  double eve_known_fraction = 0.0;   // bits Eve is credited with, per sifted bit
  double eve_known_stderr = 0.0;
  double eve_distinct_fraction = 0.0;  // BS: sifted bits hit by ≥1 of Eve's photons
  double induced_qber = 0.0;
  double induced_qber_stderr = 0.0;
  std::array<double, 3> detection_ratio{};  // early edge, centre, late edge
  double attacked_fraction = 0.0;    // IR: intercepted photons per sifted bit
  double opportunity_rate = 0.0;     // PNS: blocks holding ≥2 photons
  double collision_exponent = 0.0;   // 1 − eve_known_fraction
  bool experimental = false;
};

/// Detection probabilities of one photon at Bob's 1-bit delay interferometer.
/// Input: amplitudes over K consecutive pulses (normalized). Output: K+1
/// instances, each with (P(D1), P(D2)); instance k interferes pulses k−1, k.
std::vector<std::array<double, 2>> interferometer_response(
    std::span<const std::complex<double>> amplitudes);

/// 2μ(1−αη), clamped to [0, 1].
double bs_attack_information(double mu, double alpha_eta);

/// Event-level beamsplitting sampler over `n_announced` announced instances:
/// Eve stores Poisson(μN(1−αη)) photons spread over an N-pulse coherence
/// window and, switching her interferometer in only at the announced instance,
/// captures every photon sitting in the two pulses that form it.
AttackReport bs_attack(double mu, double alpha_eta, unsigned coherence_pulses,
                       std::uint64_t n_announced, std::uint64_t seed);

/// Intercept-resend with interception fraction min(1, 4·e_innocent), so that
/// the induced error matches the innocent one.
AttackReport ir_attack(double mu, double alpha_eta, double e_innocent,
                       std::uint64_t n_slots, std::uint64_t seed);
AttackReport ir_attack_fraction(double mu, double alpha_eta, double ir_fraction,
                                std::uint64_t n_slots, std::uint64_t seed);

/// Collective PNS over blocks of `block` consecutive pulses: QND of the block
/// photon number, one photon extracted when it is ≥ 2, one photon forwarded.
/// Block sizes above 2 are flagged experimental.
AttackReport pns_attack(double mu, unsigned block, std::uint64_t n_slots,
                        std::uint64_t seed);
inline AttackReport pns2_attack(double mu, std::uint64_t n_slots, std::uint64_t seed) {
  return pns_attack(mu, 2, n_slots, seed);
}

/// 1 − 2μ(1−αη) − 2e, clamped to [0, 1].
double hybrid_bound(double mu, double alpha_eta, double e);

/// bs_attack on the sifted bits of an ir_attack run at budget 4e; credited
/// bits add.
AttackReport hybrid_attack(double mu, double alpha_eta, double e,
                           unsigned coherence_pulses, std::uint64_t n_slots,
                           std::uint64_t seed);

}  // namespace dpsk::eve
