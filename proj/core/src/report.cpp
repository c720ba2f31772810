#include "dpsk/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "dpsk/config.hpp"

namespace dpsk::report {

namespace {

using nlohmann::ordered_json;

// JSON numbers at 6 significant digits, emitted as raw numeric tokens.
ordered_json num(double v) { return ordered_json::parse(fmt6(v)); }

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ordered_json provenance_json(const Provenance& prov, const std::string& schema) {
  return {{"tool", "dpskqkd"},
          {"version", kToolVersion},
          {"schema", schema},
          {"config_hash", hex64(prov.config_hash)},
          {"seed", prov.seed}};
}

ordered_json counts_json(const sim::DetectorCounts& c) {
  return {{"offered", c.offered},
          {"dead_time_rejected", c.dead_time_rejected},
          {"gate_rejected", c.gate_rejected},
          {"accepted", c.accepted},
          {"dark_accepted", c.dark_accepted}};
}

ordered_json trial_json(const sim::TrialResult& t) {
  ordered_json hist = {{"origin_ns", num(t.timing_histogram.origin * 1e9)},
                       {"bin_width_ns", num(t.timing_histogram.bin_width * 1e9)},
                       {"counts", t.timing_histogram.counts}};
  return {{"n_slots", t.n_slots},
          {"n_sifted", t.n_sifted},
          {"n_errors", t.n_errors},
          {"qber_measured", num(t.qber_measured)},
          {"sifted_rate", num(t.sifted_rate)},
          {"double_clicks", t.double_clicks},
          {"counts", {{"D1", counts_json(t.d1)}, {"D2", counts_json(t.d2)}}},
          {"alice_key", bits_to_hex(t.alice_key)},
          {"bob_key", bits_to_hex(t.bob_key)},
          {"timing_histogram", hist}};
}

ordered_json rate_point(const rates::RatePoint& r) {
  return {{"length_km", num(r.length_km)},
          {"alpha", num(r.alpha)},
          {"mu", num(r.mu)},
          {"alpha_eta", num(r.alpha_eta)},
          {"r_sifted", num(r.r_sifted)},
          {"qber", num(r.qber)},
          {"tau1", num(r.tau1)},
          {"secure_fraction", num(r.secure_fraction)},
          {"r_secure", num(r.r_secure)}};
}

}  // namespace

std::string fmt6(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string provenance_line(const Provenance& prov, const std::string& schema) {
  return "# tool=dpskqkd version=" + std::string(kToolVersion) + " schema=" + schema +
         " config_hash=" + hex64(prov.config_hash) + " seed=" + std::to_string(prov.seed);
}

void write_rate_curve_csv(std::ostream& out, std::span<const rates::RatePoint> points,
                          const Provenance& prov) {
  out << provenance_line(prov, "dpsk.rate-curve/1") << '\n';
  out << "length_km,alpha,mu,r_sifted,qber,tau1,secure_fraction,r_secure\n";
  for (const auto& r : points) {
    out << fmt6(r.length_km) << ',' << fmt6(r.alpha) << ',' << fmt6(r.mu) << ','
        << fmt6(r.r_sifted) << ',' << fmt6(r.qber) << ',' << fmt6(r.tau1) << ','
        << fmt6(r.secure_fraction) << ',' << fmt6(r.r_secure) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const sim::Histogram& hist,
                         const Provenance& prov) {
  out << provenance_line(prov, "dpsk.histogram/1") << '\n';
  out << "offset_ns,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double centre = hist.origin + (static_cast<double>(i) + 0.5) * hist.bin_width;
    out << fmt6(centre * 1e9) << ',' << hist.counts[i] << '\n';
  }
}

std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      nibble = (nibble << 1) | (i + k < bits.size() && bits[i + k] ? 1u : 0u);
    }
    out.push_back(kDigits[nibble]);
  }
  return out;
}

std::string trials_json(std::span<const sim::TrialResult> trials,
                        const sim::TrialSummary& summary, const SystemParams& p,
                        const Provenance& prov) {
  ordered_json doc;
  doc["provenance"] = provenance_json(prov, "dpsk.trials/1");
  doc["config"] = to_config_text(p);
  doc["trials"] = ordered_json::array();
  for (const auto& t : trials) doc["trials"].push_back(trial_json(t));
  doc["summary"] = {{"repetitions", trials.size()},
                    {"mean_qber", num(summary.mean_qber)},
                    {"stderr_qber", num(summary.stderr_qber)},
                    {"mean_sifted_rate", num(summary.mean_sifted_rate)},
                    {"stderr_sifted_rate", num(summary.stderr_sifted_rate)}};
  return doc.dump(2) + "\n";
}

std::string attack_json(const eve::AttackReport& r, const SystemParams& p,
                        const Provenance& prov,
                        std::span<const std::pair<std::string, double>> extra) {
  ordered_json doc;
  doc["provenance"] = provenance_json(prov, "dpsk.attack/1");
  doc["config"] = to_config_text(p);
  doc["attack"] = eve::to_string(r.kind);
  doc["samples"] = r.samples;
  doc["eve_known_fraction"] = num(r.eve_known_fraction);
  doc["eve_known_stderr"] = num(r.eve_known_stderr);
  doc["eve_distinct_fraction"] = num(r.eve_distinct_fraction);
  doc["induced_qber"] = num(r.induced_qber);
  doc["induced_qber_stderr"] = num(r.induced_qber_stderr);
  doc["detection_ratio"] = {num(r.detection_ratio[0]), num(r.detection_ratio[1]),
                            num(r.detection_ratio[2])};
  doc["attacked_fraction"] = num(r.attacked_fraction);
  doc["opportunity_rate"] = num(r.opportunity_rate);
  doc["collision_exponent"] = num(r.collision_exponent);
  doc["experimental"] = r.experimental;
  for (const auto& [key, value] : extra) doc[key] = num(value);
  return doc.dump(2) + "\n";
}

std::string rate_point_json(const rates::RatePoint& point) { return rate_point(point).dump(2); }

std::string optimum_json(double mu_star, const rates::RatePoint& point, const Provenance& prov) {
  ordered_json doc;
  doc["provenance"] = provenance_json(prov, "dpsk.optimum/1");
  doc["mu_star"] = num(mu_star);
  doc["point"] = rate_point(point);
  return doc.dump(2) + "\n";
}

std::string calibration_json(const rates::JitterCalibration& cal, const Provenance& prov) {
  const auto& q = cal.breakdown;
  ordered_json doc;
  doc["provenance"] = provenance_json(prov, "dpsk.calibration/1");
  // Calibrated values go out at full precision so they can be pasted back.
  char sigma[32], tail[32];
  std::snprintf(sigma, sizeof sigma, "%.9g", cal.sigma);
  std::snprintf(tail, sizeof tail, "%.9g", cal.tail_fraction);
  doc["jitter_sigma"] = ordered_json::parse(sigma);
  doc["jitter_tail_fraction"] = ordered_json::parse(tail);
  doc["e_extinction"] = num(q.e_extinction);
  doc["e_dark"] = num(q.e_dark);
  doc["e_jitter"] = num(q.e_jitter);
  doc["e_total"] = num(q.e_total);
  return doc.dump(2) + "\n";
}

std::string max_distance_json(double length_km, const Provenance& prov) {
  ordered_json doc;
  doc["provenance"] = provenance_json(prov, "dpsk.max-distance/1");
  doc["max_secure_distance_km"] = num(length_km);
  return doc.dump(2) + "\n";
}

}  // namespace dpsk::report
