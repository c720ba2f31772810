#include "dpsk/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "dpsk/rng.hpp"

namespace dpsk::sim {

PhaseSequence PhaseSequence::random(std::uint64_t n_slots, std::uint64_t seed) {
  if (n_slots < 2) throw std::invalid_argument("PhaseSequence: need at least 2 slots");
  PhaseSequence s;
  s.n_slots_ = n_slots;
  s.key_ = derive_seed(seed, "phases");
  return s;
}

PhaseSequence PhaseSequence::from_pattern(std::vector<std::uint8_t> pattern) {
  if (pattern.size() < 2) throw std::invalid_argument("PhaseSequence: need at least 2 slots");
  PhaseSequence s;
  s.n_slots_ = pattern.size();
  s.pattern_ = std::move(pattern);
  return s;
}

bool PhaseSequence::is_pi(std::uint64_t slot) const {
  if (!pattern_.empty()) return pattern_[slot] != 0;
  // Element `slot` of the SplitMix64 stream keyed by the seed.
  return (splitmix64(key_ + slot * 0x9e3779b97f4a7c15ULL) >> 63) != 0;
}

PhaseSequence generate_phases(std::uint64_t n_slots, std::uint64_t seed) {
  return PhaseSequence::random(n_slots, seed);
}

namespace {

// Photon count of a slot known to hold at least one: zero-truncated Poisson.
int truncated_poisson(double lambda, double u) {
  double pmf = lambda / std::expm1(lambda);
  double cdf = pmf;
  int k = 1;
  while (u > cdf && k < 200) {
    ++k;
    pmf *= lambda / k;
    cdf += pmf;
  }
  return k;
}

struct BlockRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::uint64_t index = 0;
};

void signal_clicks(const PhaseSequence& phases, const SystemParams& p, std::uint64_t seed,
                   const BlockRange& block, std::vector<DetectionEvent>& out) {
  const double lambda = p.mu * system_transmittance(p);
  if (lambda <= 0.0) return;
  const double slot_period = p.slot_period();
  const double misroute = 1.0 / (1.0 + std::pow(10.0, p.detector.extinction_ratio_db / 10.0));
  const auto& d = p.detector;

  auto photons = make_engine(seed, "photons", block.index);
  auto jitter = make_engine(seed, "jitter", block.index);
  auto routing = make_engine(seed, "routing", block.index);
  std::geometric_distribution<std::uint64_t> gap(-std::expm1(-lambda));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> exponential(1.0);

  // Interior slots only: slot 0 has no earlier pulse to interfere with.
  std::uint64_t slot = std::max<std::uint64_t>(block.begin, 1);
  for (slot += gap(photons); slot < block.end; slot += 1 + gap(photons)) {
    const int count = truncated_poisson(lambda, unit(photons));
    const int bit = phases.bit(slot);
    for (int i = 0; i < count; ++i) {
      const bool flip = unit(routing) < misroute;
      // Every variate is drawn whether or not its effect is enabled, so
      // each stream's sequence is independent of the configuration.
      const double core = normal(jitter);
      const bool tailed = unit(jitter) < d.jitter_tail_fraction;
      const double delay = exponential(jitter);
      const double emission = unit(jitter) - 0.5;
      const double offset = d.jitter_sigma * core + (tailed ? d.jitter_tail_tau * delay : 0.0) +
                            p.pulse_width * emission;
      DetectionEvent ev;
      ev.detector = (bit != 0) != flip ? Detector::D2 : Detector::D1;
      ev.raw_time = static_cast<double>(slot) * slot_period + offset;
      ev.slot = std::llround(ev.raw_time / slot_period);
      ev.origin_slot = static_cast<std::int64_t>(slot);
      out.push_back(ev);
    }
  }
}

void dark_clicks(const SystemParams& p, std::uint64_t seed, const BlockRange& block,
                 std::vector<DetectionEvent>& out) {
  const double rate = 0.5 * p.detector.dark_rate_total;  // per detector
  if (rate <= 0.0) return;
  const double slot_period = p.slot_period();
  const double t0 = (static_cast<double>(block.begin) - 0.5) * slot_period;
  const double t1 = (static_cast<double>(block.end) - 0.5) * slot_period;
  for (int det = 0; det < 2; ++det) {
    auto engine = make_engine(seed, "dark", 2 * block.index + det);
    std::exponential_distribution<double> gap(rate);
    for (double t = t0 + gap(engine); t < t1; t += gap(engine)) {
      DetectionEvent ev;
      ev.detector = static_cast<Detector>(det);
      ev.raw_time = t;
      ev.slot = std::llround(t / slot_period);
      out.push_back(ev);
    }
  }
}

bool event_before(const DetectionEvent& a, const DetectionEvent& b) {
  if (a.raw_time != b.raw_time) return a.raw_time < b.raw_time;
  if (a.detector != b.detector) return a.detector < b.detector;
  return a.origin_slot.value_or(-1) < b.origin_slot.value_or(-1);
}

}  // namespace

std::vector<DetectionEvent> generate_clicks(const PhaseSequence& phases, const SystemParams& p,
                                            std::uint64_t seed, const SimOptions& opts) {
  const std::uint64_t n_slots = phases.size();
  const std::uint64_t block_slots = std::max<std::uint64_t>(opts.block_slots, 1);
  const std::uint64_t n_blocks = (n_slots + block_slots - 1) / block_slots;

  std::vector<std::vector<DetectionEvent>> per_block(n_blocks);
  auto run_block = [&](std::uint64_t b) {
    const BlockRange range{b * block_slots, std::min(n_slots, (b + 1) * block_slots), b};
    signal_clicks(phases, p, seed, range, per_block[b]);
    dark_clicks(p, seed, range, per_block[b]);
  };

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(opts.workers, 1, std::max<std::uint64_t>(n_blocks, 1)));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto b = next++; b < n_blocks; b = next++) run_block(b);
      });
    }
  }

  std::size_t total = 0;
  for (const auto& v : per_block) total += v.size();
  std::vector<DetectionEvent> events;
  events.reserve(total);
  for (auto& v : per_block) {
    events.insert(events.end(), v.begin(), v.end());
    std::vector<DetectionEvent>().swap(v);
  }
  std::sort(events.begin(), events.end(), event_before);
  return events;
}

void apply_dead_time(std::span<DetectionEvent> events, double dead_time) {
  if (dead_time <= 0.0) return;
  double last[2] = {-std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  for (auto& ev : events) {
    if (!ev.accepted) continue;
    double& previous = last[static_cast<int>(ev.detector)];
    if (ev.raw_time - previous < dead_time) {
      ev.accepted = false;
    } else {
      previous = ev.raw_time;
    }
  }
}

void apply_gating(std::span<DetectionEvent> events, const SystemParams& p,
                  std::uint64_t n_slots) {
  const double slot_period = p.slot_period();
  const double half_gate = 0.5 * p.detector.gate_width;
  for (auto& ev : events) {
    ev.slot = std::llround(ev.raw_time / slot_period);
    if (!ev.accepted) continue;
    const double offset = ev.raw_time - static_cast<double>(ev.slot) * slot_period;
    const bool key_slot = ev.slot >= 1 && static_cast<std::uint64_t>(ev.slot) < n_slots;
    if (!key_slot || std::abs(offset) > half_gate) ev.accepted = false;
  }
}

std::vector<DetectionEvent> simulate_detection(const PhaseSequence& phases,
                                               const SystemParams& p, std::uint64_t seed,
                                               const SimOptions& opts) {
  auto events = generate_clicks(phases, p, seed, opts);
  apply_dead_time(events, p.detector.dead_time);
  apply_gating(events, p, phases.size());
  return events;
}

TrialResult sift(const PhaseSequence& alice, std::span<const DetectionEvent> events) {
  TrialResult r;
  r.n_slots = alice.size();
  std::size_t i = 0;
  while (i < events.size()) {
    if (!events[i].accepted) {
      ++i;
      continue;
    }
    // Accepted clicks of one gate are contiguous in time order.
    const std::int64_t slot = events[i].slot;
    bool clicked[2] = {false, false};
    for (; i < events.size() && (!events[i].accepted || events[i].slot == slot); ++i) {
      if (!events[i].accepted) continue;
      const auto det = static_cast<int>(events[i].detector);
      clicked[det] = true;
      auto& counts = det == 0 ? r.d1 : r.d2;
      ++counts.accepted;
      if (!events[i].origin_slot) ++counts.dark_accepted;
    }
    if (clicked[0] && clicked[1]) {
      ++r.double_clicks;
      continue;
    }
    const auto a = static_cast<std::uint8_t>(alice.bit(static_cast<std::uint64_t>(slot)));
    const auto b = static_cast<std::uint8_t>(clicked[1] ? 1 : 0);
    r.alice_key.push_back(a);
    r.bob_key.push_back(b);
    if (a != b) ++r.n_errors;
  }
  r.n_sifted = r.alice_key.size();
  r.qber_measured = r.n_sifted ? static_cast<double>(r.n_errors) / r.n_sifted : 0.0;
  return r;
}

Histogram timing_histogram(std::span<const DetectionEvent> events, double slot_period,
                           unsigned bins) {
  Histogram h;
  bins = std::max(bins, 1u);
  h.origin = -0.5 * slot_period;
  h.bin_width = slot_period / bins;
  h.counts.assign(bins, 0);
  for (const auto& ev : events) {
    if (!ev.accepted) continue;
    const double offset = ev.raw_time - std::nearbyint(ev.raw_time / slot_period) * slot_period;
    const auto idx = static_cast<long>(std::floor((offset - h.origin) / h.bin_width));
    ++h.counts[static_cast<std::size_t>(std::clamp<long>(idx, 0, bins - 1))];
  }
  return h;
}

TrialResult run_trial(const SystemParams& p, std::uint64_t n_slots, std::uint64_t seed,
                      const SimOptions& opts) {
  if (n_slots < 10000) throw std::invalid_argument("run_trial: need at least 1e4 slots");
  const auto phases = generate_phases(n_slots, seed);
  auto events = generate_clicks(phases, p, seed, opts);

  std::uint64_t offered[2] = {0, 0};
  for (const auto& ev : events) ++offered[static_cast<int>(ev.detector)];
  apply_dead_time(events, p.detector.dead_time);
  std::uint64_t live[2] = {0, 0};
  for (const auto& ev : events) live[static_cast<int>(ev.detector)] += ev.accepted ? 1 : 0;
  auto histogram = timing_histogram(events, p.slot_period(), opts.histogram_bins);
  apply_gating(events, p, n_slots);

  auto r = sift(phases, events);
  r.timing_histogram = std::move(histogram);
  DetectorCounts* counts[2] = {&r.d1, &r.d2};
  for (int d = 0; d < 2; ++d) {
    counts[d]->offered = offered[d];
    counts[d]->dead_time_rejected = offered[d] - live[d];
    counts[d]->gate_rejected = live[d] - counts[d]->accepted;
  }
  r.sifted_rate = static_cast<double>(r.n_sifted) * p.clock / static_cast<double>(n_slots);
  return r;
}

std::vector<TrialResult> run_trials(const SystemParams& p, std::uint64_t n_slots,
                                    std::uint64_t seed, unsigned repeat,
                                    const SimOptions& opts) {
  std::vector<TrialResult> trials;
  trials.reserve(repeat);
  for (unsigned i = 0; i < repeat; ++i) {
    trials.push_back(run_trial(p, n_slots, derive_seed(seed, "repetition", i), opts));
  }
  return trials;
}

TrialSummary summarize(std::span<const TrialResult> trials) {
  TrialSummary s;
  const auto n = static_cast<double>(trials.size());
  if (trials.empty()) return s;
  for (const auto& t : trials) {
    s.mean_qber += t.qber_measured / n;
    s.mean_sifted_rate += t.sifted_rate / n;
  }
  if (trials.size() > 1) {
    double vq = 0.0;
    double vr = 0.0;
    for (const auto& t : trials) {
      vq += (t.qber_measured - s.mean_qber) * (t.qber_measured - s.mean_qber);
      vr += (t.sifted_rate - s.mean_sifted_rate) * (t.sifted_rate - s.mean_sifted_rate);
    }
    s.stderr_qber = std::sqrt(vq / (n - 1) / n);
    s.stderr_sifted_rate = std::sqrt(vr / (n - 1) / n);
  }
  return s;
}

}  // namespace dpsk::sim
