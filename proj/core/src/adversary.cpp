#include "dpsk/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dpsk/rates.hpp"
#include "dpsk/rng.hpp"
#include "dpsk/simulate.hpp"

namespace dpsk::eve {

namespace {

using Amplitude = std::complex<double>;

struct Outcome {
  std::size_t instance = 0;
  int detector = 0;  // 0 = D1, 1 = D2
};

Outcome sample_outcome(const std::vector<std::array<double, 2>>& probs, double u) {
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    for (int d = 0; d < 2; ++d) {
      acc += probs[k][d];
      if (u < acc) return {k, d};
    }
  }
  return {probs.size() - 1, 1};
}

Amplitude phase_factor(bool pi) { return pi ? Amplitude(-1.0, 0.0) : Amplitude(1.0, 0.0); }

double binomial_stderr(double p, std::uint64_t n) {
  return n ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::BS: return "bs";
    case AttackKind::IR: return "ir";
    case AttackKind::PNS2: return "pns2";
    case AttackKind::HYBRID: return "hybrid";
  }
  return "?";
}

AttackKind parse_attack_kind(const std::string& name) {
  for (auto k : {AttackKind::BS, AttackKind::IR, AttackKind::PNS2, AttackKind::HYBRID}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown attack '" + name + "'");
}

void validate(const AttackConfig& c) {
  if (!(c.ir_fraction >= 0.0 && c.ir_fraction <= 1.0)) {
    throw std::invalid_argument("ir_fraction must be in [0, 1]");
  }
  if (c.pns_block < 2) throw std::invalid_argument("pns_block must be >= 2");
  if (c.coherence_pulses < 2) throw std::invalid_argument("coherence_pulses must be >= 2");
}

std::vector<std::array<double, 2>> interferometer_response(std::span<const Amplitude> amps) {
  // Instance k sees pulse k through the short arm and pulse k−1 through the
  // long one; the output coupler sends their sum to D1 and difference to D2.
  std::vector<std::array<double, 2>> out(amps.size() + 1);
  for (std::size_t k = 0; k <= amps.size(); ++k) {
    const Amplitude now = k < amps.size() ? amps[k] : Amplitude{};
    const Amplitude before = k > 0 ? amps[k - 1] : Amplitude{};
    out[k] = {std::norm(now + before) / 4.0, std::norm(now - before) / 4.0};
  }
  return out;
}

double bs_attack_information(double mu, double alpha_eta) {
  return std::clamp(2.0 * mu * (1.0 - alpha_eta), 0.0, 1.0);
}

AttackReport bs_attack(double mu, double alpha_eta, unsigned coherence_pulses,
                       std::uint64_t n_announced, std::uint64_t seed) {
  if (coherence_pulses < 2) throw std::invalid_argument("coherence_pulses must be >= 2");
  auto engine = make_engine(seed, "eve-bs");
  std::poisson_distribution<std::uint64_t> stored(mu * coherence_pulses * (1.0 - alpha_eta));
  std::uniform_int_distribution<unsigned> pulse(0, coherence_pulses - 1);
  std::uniform_int_distribution<unsigned> instance(1, coherence_pulses - 1);

  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t distinct = 0;
  for (std::uint64_t i = 0; i < n_announced; ++i) {
    const unsigned j = instance(engine);
    std::uint64_t hits = 0;
    for (auto m = stored(engine); m > 0; --m) {
      const unsigned at = pulse(engine);
      if (at == j || at + 1 == j) ++hits;
    }
    sum += static_cast<double>(hits);
    sum_sq += static_cast<double>(hits * hits);
    distinct += hits > 0 ? 1 : 0;
  }

  AttackReport r;
  r.kind = AttackKind::BS;
  r.samples = n_announced;
  if (n_announced > 0) {
    const double n = static_cast<double>(n_announced);
    const double mean = sum / n;
    r.eve_known_fraction = std::min(mean, 1.0);
    r.eve_known_stderr = n > 1 ? std::sqrt((sum_sq / n - mean * mean) * n / (n - 1) / n) : 0.0;
    r.eve_distinct_fraction = ratio(distinct, n_announced);
  }
  r.detection_ratio = {0.0, 1.0, 0.0};
  r.collision_exponent = 1.0 - r.eve_known_fraction;
  return r;
}

AttackReport ir_attack(double mu, double alpha_eta, double e_innocent, std::uint64_t n_slots,
                       std::uint64_t seed) {
  return ir_attack_fraction(mu, alpha_eta, std::clamp(4.0 * e_innocent, 0.0, 1.0), n_slots,
                            seed);
}

AttackReport ir_attack_fraction(double mu, double alpha_eta, double ir_fraction,
                                std::uint64_t n_slots, std::uint64_t seed) {
  if (!(ir_fraction >= 0.0 && ir_fraction <= 1.0)) {
    throw std::invalid_argument("ir_fraction must be in [0, 1]");
  }
  const auto phases = sim::PhaseSequence::random(n_slots, seed);
  auto clicks = make_engine(seed, "eve-ir-clicks");
  auto eve = make_engine(seed, "eve-ir");
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::uint64_t sifted = 0, attacked = 0, errors = 0, known = 0;
  std::array<std::uint64_t, 3> at_instance{};
  const double lambda = mu * alpha_eta;
  if (lambda > 0.0 && n_slots > 4) {
    std::geometric_distribution<std::uint64_t> gap(-std::expm1(-lambda));
    // Slots 2..n−3 so the resent photon's edge instances stay inside the train.
    for (std::uint64_t j = 2 + gap(clicks); j + 2 < n_slots; j += 1 + gap(clicks)) {
      ++sifted;
      if (unit(eve) >= ir_fraction) continue;
      ++attacked;
      // Eve measured Alice's phase difference at j and resends one photon
      // over pulses j−1, j carrying it.
      const Amplitude amps[2] = {phase_factor(false) / std::numbers::sqrt2,
                                 phase_factor(phases.bit(j) != 0) / std::numbers::sqrt2};
      const auto outcome = sample_outcome(interferometer_response(amps), unit(eve));
      const std::uint64_t announced = j - 1 + outcome.instance;
      ++at_instance[outcome.instance];
      if (outcome.detector != phases.bit(announced)) ++errors;
      if (outcome.instance == 1) ++known;
    }
  }

  AttackReport r;
  r.kind = AttackKind::IR;
  r.samples = sifted;
  r.eve_known_fraction = ratio(known, sifted);
  r.eve_known_stderr = binomial_stderr(r.eve_known_fraction, sifted);
  r.induced_qber = ratio(errors, sifted);
  r.induced_qber_stderr = binomial_stderr(r.induced_qber, sifted);
  for (int k = 0; k < 3; ++k) r.detection_ratio[k] = ratio(at_instance[k], attacked);
  r.attacked_fraction = ratio(attacked, sifted);
  r.collision_exponent = 1.0 - r.eve_known_fraction;
  return r;
}

AttackReport pns_attack(double mu, unsigned block, std::uint64_t n_slots, std::uint64_t seed) {
  if (block < 2) throw std::invalid_argument("pns block must be >= 2");
  const auto phases = sim::PhaseSequence::random(n_slots, seed);
  auto qnd = make_engine(seed, "eve-pns-qnd");
  auto eve = make_engine(seed, "eve-pns");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<unsigned> held(0, block - 1);

  // Blocks start at slot 1 so every instance has a defined phase difference.
  const std::uint64_t n_blocks = n_slots > block + 1 ? (n_slots - 2) / block : 0;
  const double mean = block * mu;
  const double p_attack = -std::expm1(-mean) - mean * std::exp(-mean);  // P(n ≥ 2)

  std::uint64_t attacked = 0, errors = 0, known = 0;
  std::uint64_t early = 0, interior = 0, late = 0;
  std::vector<Amplitude> amps(block);
  if (p_attack > 0.0 && n_blocks > 0) {
    std::geometric_distribution<std::uint64_t> gap(std::min(p_attack, 1.0));
    for (std::uint64_t b = gap(qnd); b < n_blocks; b += 1 + gap(qnd)) {
      ++attacked;
      const std::uint64_t first = 1 + b * block;
      for (unsigned k = 0; k < block; ++k) {
        amps[k] = phase_factor(phases.is_pi(first + k)) / std::sqrt(static_cast<double>(block));
      }
      const auto outcome = sample_outcome(interferometer_response(amps), unit(eve));
      const std::uint64_t announced = first + outcome.instance;
      if (outcome.detector != phases.bit(announced)) ++errors;
      if (outcome.instance == 0) {
        ++early;
      } else if (outcome.instance == block) {
        ++late;
      } else {
        ++interior;
        // Eve's extracted photon sits in one pulse of the block; her switched
        // interferometer reads instance i only if it is in pulse i−1 or i.
        const unsigned at = held(eve);
        if (at + 1 == outcome.instance || at == outcome.instance) ++known;
      }
    }
  }

  AttackReport r;
  r.kind = AttackKind::PNS2;
  r.samples = attacked;
  r.opportunity_rate = ratio(attacked, n_blocks);
  r.induced_qber = ratio(errors, attacked);
  r.induced_qber_stderr = binomial_stderr(r.induced_qber, attacked);
  r.eve_known_fraction = ratio(known, attacked);
  r.eve_known_stderr = binomial_stderr(r.eve_known_fraction, attacked);
  r.detection_ratio = {ratio(early, attacked), ratio(interior, attacked), ratio(late, attacked)};
  r.collision_exponent = 1.0 - r.eve_known_fraction;
  r.experimental = block > 2;
  return r;
}

double hybrid_bound(double mu, double alpha_eta, double e) {
  return rates::collision_exponent(mu, alpha_eta, e);
}

AttackReport hybrid_attack(double mu, double alpha_eta, double e, unsigned coherence_pulses,
                           std::uint64_t n_slots, std::uint64_t seed) {
  const auto ir = ir_attack(mu, alpha_eta, e, n_slots, derive_seed(seed, "hybrid-ir"));
  const auto bs =
      bs_attack(mu, alpha_eta, coherence_pulses, ir.samples, derive_seed(seed, "hybrid-bs"));
  AttackReport r = ir;
  r.kind = AttackKind::HYBRID;
  r.eve_known_fraction = std::min(1.0, ir.eve_known_fraction + bs.eve_known_fraction);
  r.eve_known_stderr = std::hypot(ir.eve_known_stderr, bs.eve_known_stderr);
  r.eve_distinct_fraction = bs.eve_distinct_fraction;
  r.collision_exponent = 1.0 - r.eve_known_fraction;
  return r;
}

}  // namespace dpsk::eve
