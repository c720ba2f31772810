#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpsk/params.hpp"

/// Pulse-level Monte Carlo of the honest DPSK link.
///
/// Clicks are simulated rather than amplitudes: every interior slot n (pulses
/// n−1 and n interfering) emits Poisson(μαη) detectable photons, routed to D1
/// when Alice's phase difference is 0 and D2 when it is π, and swapped with
/// probability 1/(1+ER). Each click is then jittered, subjected to per-detector
/// dead time (the detectors are free-running) and finally time-gated.
namespace dpsk::sim {

/// Alice's {0, π} phase train. Random sequences are counter-based: the phase
/// of any slot is a pure function of (seed, slot), so huge trains need no
/// storage and any block of slots can be drawn independently.
class PhaseSequence {
 public:
  static PhaseSequence random(std::uint64_t n_slots, std::uint64_t seed);
  /// Fixed pattern, 0 = phase 0, nonzero = π.
  static PhaseSequence from_pattern(std::vector<std::uint8_t> pattern);

  std::uint64_t size() const noexcept { return n_slots_; }
  bool is_pi(std::uint64_t slot) const;
  /// Phase-difference bit of slot ≥ 1: 0 if φ_slot = φ_{slot−1}, else 1.
  int bit(std::uint64_t slot) const { return is_pi(slot) != is_pi(slot - 1) ? 1 : 0; }

 private:
  PhaseSequence() = default;

  std::uint64_t n_slots_ = 0;
  std::uint64_t key_ = 0;
  std::vector<std::uint8_t> pattern_;
};

enum class Detector : std::uint8_t { D1 = 0, D2 = 1 };

struct DetectionEvent {
  std::int64_t slot = 0;  // gate slot the click falls nearest to
  Detector detector = Detector::D1;
  double raw_time = 0.0;  // s, from the centre of slot 0
  bool accepted = true;
  std::optional<std::int64_t> origin_slot;  // emitting slot; empty for dark counts
};

struct Histogram {
  double origin = 0.0;     // s, left edge of bin 0
  double bin_width = 0.0;  // s
  std::vector<std::uint64_t> counts;
};

struct DetectorCounts {
  std::uint64_t offered = 0;             // all clicks
  std::uint64_t dead_time_rejected = 0;
  std::uint64_t gate_rejected = 0;
  std::uint64_t accepted = 0;
  std::uint64_t dark_accepted = 0;
};

struct TrialResult {
  std::uint64_t n_slots = 0;
  std::vector<std::uint8_t> alice_key;
  std::vector<std::uint8_t> bob_key;
  std::uint64_t n_sifted = 0;
  std::uint64_t n_errors = 0;
  double qber_measured = 0.0;
  std::uint64_t double_clicks = 0;  // slots discarded for clicks on both detectors
  DetectorCounts d1;
  DetectorCounts d2;
  double sifted_rate = 0.0;  // bit/s
  Histogram timing_histogram;
};

struct SimOptions {
  unsigned workers = 1;
  /// Slots per independently seeded block; results depend on this, not on
  /// `workers`.
  std::uint64_t block_slots = std::uint64_t{1} << 22;
  unsigned histogram_bins = 100;
};

PhaseSequence generate_phases(std::uint64_t n_slots, std::uint64_t seed);

/// Every click before dead time and gating, sorted by time; all accepted.
std::vector<DetectionEvent> generate_clicks(const PhaseSequence& phases,
                                            const SystemParams& p, std::uint64_t seed,
                                            const SimOptions& opts = {});

/// Per detector, rejects any click within `dead_time` after an accepted
/// click on the same detector. Events must be sorted by raw_time.
void apply_dead_time(std::span<DetectionEvent> events, double dead_time);

/// Assigns each event its nearest slot and rejects it unless it falls inside
/// that slot's gate and the slot is a key slot (1 ≤ slot < n_slots).
void apply_gating(std::span<DetectionEvent> events, const SystemParams& p,
                  std::uint64_t n_slots);

/// generate_clicks + apply_dead_time + apply_gating.
std::vector<DetectionEvent> simulate_detection(const PhaseSequence& phases,
                                               const SystemParams& p, std::uint64_t seed,
                                               const SimOptions& opts = {});

/// Bob announces every slot with an accepted click; D1 → 0, D2 → 1. Slots
/// with accepted clicks on both detectors are dropped.
TrialResult sift(const PhaseSequence& alice, std::span<const DetectionEvent> events);

/// Offsets of the non-dead-time-rejected clicks from their nearest slot centre.
Histogram timing_histogram(std::span<const DetectionEvent> events, double slot_period,
                           unsigned bins);

TrialResult run_trial(const SystemParams& p, std::uint64_t n_slots, std::uint64_t seed,
                      const SimOptions& opts = {});

struct TrialSummary {
  double mean_qber = 0.0;
  double stderr_qber = 0.0;
  double mean_sifted_rate = 0.0;
  double stderr_sifted_rate = 0.0;
};

/// `repeat` trials with seeds derived from `seed`, plus mean and standard error.
std::vector<TrialResult> run_trials(const SystemParams& p, std::uint64_t n_slots,
                                    std::uint64_t seed, unsigned repeat,
                                    const SimOptions& opts = {});
TrialSummary summarize(std::span<const TrialResult> trials);

}  // namespace dpsk::sim
