#include <doctest.h>

#include <json.hpp>

#include <sstream>
#include <vector>

#include "dpsk/config.hpp"
#include "dpsk/optimize.hpp"
#include "dpsk/report.hpp"

using namespace dpsk;

TEST_CASE("six significant digits") {
  CHECK(report::fmt6(0.0795) == "0.0795");
  CHECK(report::fmt6(1234567.0) == "1.23457e+06");
  CHECK(report::fmt6(0.0) == "0");
}

TEST_CASE("bits pack MSB first") {
  const std::vector<std::uint8_t> bits = {1, 0, 1, 1, 0, 0, 0, 1, 1};
  CHECK(report::bits_to_hex(bits) == "b18");
  CHECK(report::bits_to_hex(std::vector<std::uint8_t>{}).empty());
}

TEST_CASE("rate curve csv parses back") {
  SystemParams p;
  p.detector = find_preset("long-distance");
  const std::vector<double> lengths = {0, 50, 105, 140};
  const auto pts = opt::distance_sweep(p, lengths, true);
  std::ostringstream out;
  report::write_rate_curve_csv(out, pts, {config_hash(p), 0});

  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# tool=dpskqkd version=1.0.0 schema=dpsk.rate-curve/1", 0) == 0);
  std::getline(in, line);
  CHECK(line == "length_km,alpha,mu,r_sifted,qber,tau1,secure_fraction,r_secure");
  for (const auto& pt : pts) {
    REQUIRE(std::getline(in, line));
    std::vector<double> cols;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cols.push_back(std::stod(cell));
    REQUIRE(cols.size() == 8);
    CHECK(cols[0] == doctest::Approx(pt.length_km).epsilon(1e-5));
    CHECK(cols[2] == doctest::Approx(pt.mu).epsilon(1e-5));
    CHECK(cols[7] == doctest::Approx(pt.r_secure).epsilon(1e-5));
  }
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("trial json carries provenance and summary") {
  SystemParams p;
  p.channel.fiber_length = 20;
  const auto trials = sim::run_trials(p, 100'000, 3, 2);
  const auto doc = nlohmann::json::parse(
      report::trials_json(trials, sim::summarize(trials), p, {config_hash(p), 3}));
  CHECK(doc["provenance"]["seed"] == 3);
  CHECK(doc["provenance"]["schema"] == "dpsk.trials/1");
  CHECK(doc["trials"].size() == 2);
  CHECK(doc["trials"][0]["n_sifted"] == trials[0].n_sifted);
  CHECK(load_config(doc["config"].get<std::string>()) == p);
  CHECK(doc["summary"]["repetitions"] == 2);
}

TEST_CASE("attack json extras") {
  eve::AttackReport r;
  r.kind = eve::AttackKind::HYBRID;
  r.eve_known_fraction = 0.499;
  const std::vector<std::pair<std::string, double>> extra = {{"tau1", 0.499}};
  const auto doc = nlohmann::json::parse(report::attack_json(r, SystemParams{}, {1, 2}, extra));
  CHECK(doc["attack"] == "hybrid");
  CHECK(doc["tau1"].get<double>() == doctest::Approx(0.499));
  CHECK(doc["provenance"]["config_hash"] == "0000000000000001");
}
