#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "dpsk/rates.hpp"
#include "dpsk/simulate.hpp"

using namespace dpsk;
using namespace dpsk::sim;

namespace {

// Lossless, noiseless, jitter-free link with transmittance αη.
SystemParams ideal(double alpha_eta, double mu) {
  SystemParams p;
  p.mu = mu;
  p.detector.eta = 1.0;
  p.detector.dark_rate_total = 0.0;
  p.detector.dead_time = 0.0;
  p.detector.jitter_sigma = 0.0;
  p.detector.jitter_tail_fraction = 0.0;
  p.detector.extinction_ratio_db = 300.0;
  p.channel = {0.0, 0.2, -10.0 * std::log10(alpha_eta)};
  return p;
}

DetectionEvent click(double t, Detector d, std::optional<std::int64_t> origin = 0) {
  DetectionEvent ev;
  ev.raw_time = t;
  ev.detector = d;
  ev.slot = std::llround(t / 1e-9);
  ev.origin_slot = origin;
  return ev;
}

}  // namespace

TEST_CASE("random phases are fair and reproducible") {
  const auto a = PhaseSequence::random(1'000'000, 5);
  const auto b = PhaseSequence::random(1'000'000, 5);
  const auto c = PhaseSequence::random(1'000'000, 6);
  std::uint64_t pi = 0, same = 0, diff_bits = 0;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    pi += a.is_pi(i);
    same += a.is_pi(i) == b.is_pi(i);
    diff_bits += a.is_pi(i) != c.is_pi(i);
  }
  CHECK(same == a.size());
  const double n = static_cast<double>(a.size());
  CHECK(std::abs(pi - 0.5 * n) < 4 * std::sqrt(0.25 * n));
  CHECK(std::abs(diff_bits - 0.5 * n) < 4 * std::sqrt(0.25 * n));
  CHECK_THROWS(PhaseSequence::random(1, 1));
}

TEST_CASE("pattern phases give phase-difference bits") {
  const auto s = PhaseSequence::from_pattern({0, 0, 1, 1, 0});
  CHECK(s.size() == 5);
  CHECK(s.bit(1) == 0);
  CHECK(s.bit(2) == 1);
  CHECK(s.bit(3) == 0);
  CHECK(s.bit(4) == 1);
}

TEST_CASE("constant phase train lights only D1") {
  const auto p = ideal(1.0, 0.1);
  const auto zeros = PhaseSequence::from_pattern(std::vector<std::uint8_t>(100'000, 0));
  const auto events = simulate_detection(zeros, p, 3);
  REQUIRE(!events.empty());
  for (const auto& ev : events) CHECK(ev.detector == Detector::D1);

  std::vector<std::uint8_t> alt(100'000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2;
  const auto flips = simulate_detection(PhaseSequence::from_pattern(alt), p, 3);
  for (const auto& ev : flips) CHECK(ev.detector == Detector::D2);
}

TEST_CASE("dead time is per detector and non-paralyzable") {
  std::vector<DetectionEvent> ev = {click(0.0, Detector::D1), click(10e-9, Detector::D1),
                                    click(20e-9, Detector::D2), click(45e-9, Detector::D1),
                                    click(55e-9, Detector::D1), click(60e-9, Detector::D2)};
  apply_dead_time(ev, 50e-9);
  CHECK(ev[0].accepted);
  CHECK_FALSE(ev[1].accepted);
  CHECK(ev[2].accepted);
  CHECK_FALSE(ev[3].accepted);
  CHECK(ev[4].accepted);  // 55 ns after the last *accepted* D1 click
  CHECK_FALSE(ev[5].accepted);
}

TEST_CASE("gating keeps key slots inside the window") {
  SystemParams p;
  p.detector.gate_width = 0.2e-9;
  std::vector<DetectionEvent> ev = {click(0.0, Detector::D1),       // slot 0: edge
                                    click(5.05e-9, Detector::D1),   // inside
                                    click(6.15e-9, Detector::D2),   // outside
                                    click(6.95e-9, Detector::D2),   // slot 7, inside
                                    click(10.0e-9, Detector::D1)};  // slot 10 = n_slots
  apply_gating(ev, p, 10);
  CHECK_FALSE(ev[0].accepted);
  CHECK(ev[1].accepted);
  CHECK(ev[1].slot == 5);
  CHECK_FALSE(ev[2].accepted);
  CHECK(ev[3].accepted);
  CHECK(ev[3].slot == 7);
  CHECK_FALSE(ev[4].accepted);
}

TEST_CASE("sifting by hand") {
  const auto alice = PhaseSequence::from_pattern({0, 1, 1, 0, 0, 0});
  // bits: slot1=1 slot2=0 slot3=1 slot4=0 slot5=0
  std::vector<DetectionEvent> ev = {click(1e-9, Detector::D2),    // right
                                    click(2e-9, Detector::D2),    // wrong
                                    click(3e-9, Detector::D1),    // double click,
                                    click(3.01e-9, Detector::D2), // discarded
                                    click(5e-9, Detector::D1, std::nullopt),
                                    click(5.02e-9, Detector::D1)};  // two on D1: one bit
  const auto r = sift(alice, ev);
  CHECK(r.n_sifted == 3);
  CHECK(r.n_errors == 1);
  CHECK(r.double_clicks == 1);
  CHECK(r.alice_key == std::vector<std::uint8_t>{1, 0, 0});
  CHECK(r.bob_key == std::vector<std::uint8_t>{1, 1, 0});
  CHECK(r.d1.accepted == 3);
  CHECK(r.d1.dark_accepted == 1);
  CHECK(r.d2.accepted == 3);
  CHECK(r.qber_measured == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("trials are deterministic and worker independent") {
  SystemParams p;
  p.detector = find_preset("high-rate");
  p.channel.fiber_length = 30.0;
  SimOptions one;
  one.block_slots = 1 << 16;
  SimOptions many = one;
  many.workers = 4;
  const auto a = run_trial(p, 2'000'000, 11, one);
  const auto b = run_trial(p, 2'000'000, 11, many);
  const auto c = run_trial(p, 2'000'000, 12, one);
  CHECK(a.alice_key == b.alice_key);
  CHECK(a.bob_key == b.bob_key);
  CHECK(a.timing_histogram.counts == b.timing_histogram.counts);
  CHECK(a.d1.offered == b.d1.offered);
  CHECK(a.alice_key != c.alice_key);
  CHECK_THROWS(run_trial(p, 9'999, 1));
}

TEST_CASE("counts are conserved") {
  SystemParams p;
  p.detector = find_preset("high-rate");
  p.detector.dark_rate_total = 2e6;  // enough darks to exercise double clicks
  p.channel.fiber_length = 10.0;
  const std::uint64_t n = 3'000'000;
  const auto phases = generate_phases(n, 21);
  const auto events = simulate_detection(phases, p, 21);
  std::set<std::int64_t> slots;
  std::uint64_t accepted = 0;
  for (const auto& ev : events) {
    if (!ev.accepted) continue;
    ++accepted;
    slots.insert(ev.slot);
    CHECK(ev.slot >= 1);
    CHECK(ev.slot < static_cast<std::int64_t>(n));
  }
  const auto r = sift(phases, events);
  CHECK(r.n_sifted + r.double_clicks == slots.size());
  CHECK(r.d1.accepted + r.d2.accepted == accepted);
  CHECK(r.double_clicks > 0);

  const auto t = run_trial(p, n, 21);
  for (const auto* c : {&t.d1, &t.d2}) {
    CHECK(c->offered == c->dead_time_rejected + c->gate_rejected + c->accepted);
  }
  const auto live = t.d1.offered + t.d2.offered - t.d1.dead_time_rejected - t.d2.dead_time_rejected;
  const auto hist = t.timing_histogram.counts;
  CHECK(std::accumulate(hist.begin(), hist.end(), std::uint64_t{0}) == live);
  CHECK(t.sifted_rate == doctest::Approx(t.n_sifted * p.clock / n));
}

TEST_CASE("sifted rate follows the dead-time exponential") {
  // μαη f_c = 2 MHz, 1 MHz per detector, t_d = 50 ns.
  auto p = ideal(2e-2, 0.1);
  p.detector.dead_time = 50e-9;
  const std::uint64_t n = 100'000'000;
  const auto t = run_trial(p, n, 4);
  const double expected = rates::sifted_rate(p);
  CHECK(t.sifted_rate == doctest::Approx(expected).epsilon(0.01));
  const double ratio = t.sifted_rate / (p.mu * system_transmittance(p) * p.clock);
  CHECK(ratio == doctest::Approx(std::exp(-0.05)).epsilon(0.01));
}

TEST_CASE("extinction-limited error rate") {
  auto p = ideal(1e-2, 0.1);
  p.detector.extinction_ratio_db = 20.0;
  const auto t = run_trial(p, 20'000'000, 8);
  const double e = rates::qber_model(p).e_total;
  const double sd = std::sqrt(e * (1 - e) / t.n_sifted);
  CHECK(t.n_sifted > 10'000);
  CHECK(std::abs(t.qber_measured - e) < 4 * sd);
}

TEST_CASE("repetitions and summary") {
  SystemParams p;
  p.detector = find_preset("high-rate");
  p.channel.fiber_length = 20.0;
  const auto trials = run_trials(p, 200'000, 99, 5);
  REQUIRE(trials.size() == 5);
  CHECK(trials[0].alice_key != trials[1].alice_key);
  const auto s = summarize(trials);
  double mean = 0.0;
  for (const auto& t : trials) mean += t.qber_measured / 5;
  double var = 0.0;
  for (const auto& t : trials) var += (t.qber_measured - mean) * (t.qber_measured - mean);
  CHECK(s.mean_qber == doctest::Approx(mean));
  CHECK(s.stderr_qber == doctest::Approx(std::sqrt(var / 4 / 5)));
  CHECK(summarize(std::span<const TrialResult>{}).mean_qber == 0.0);
}
