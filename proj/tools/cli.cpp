#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "dpsk/adversary.hpp"
#include "dpsk/config.hpp"
#include "dpsk/optimize.hpp"
#include "dpsk/rates.hpp"
#include "dpsk/report.hpp"
#include "dpsk/simulate.hpp"

namespace dpskqkd {

namespace {

using namespace dpsk;

// Flags shared by every subcommand.
struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "configuration file (key=value or JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "override one config key, e.g. --set mu=0.1");
  cmd->add_option("--out", c.out_path, "write the result here instead of stdout");
}

SystemParams load(const Common& c) {
  std::string text;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path, std::ios::binary);
    if (!in) throw ConfigError(ConfigError::Kind::Parse, "config", "cannot read " + c.config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  return load_config(text, c.overrides);
}

void emit(const Common& c, const std::string& body, std::ostream& out) {
  if (c.out_path.empty()) {
    out << body;
    return;
  }
  std::ofstream file(c.out_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + c.out_path);
  file << body;
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(ConfigError::Kind::Parse, "lengths", "not a number: '" + text + "'");
  }
  return v;
}

// "start:stop:step", stop inclusive; start > stop gives no lengths.
std::vector<double> parse_lengths(const std::string& range) {
  const auto a = range.find(':');
  const auto b = a == std::string::npos ? a : range.find(':', a + 1);
  if (b == std::string::npos) {
    throw ConfigError(ConfigError::Kind::Parse, "lengths", "expected start:stop:step");
  }
  const double start = parse_double(range.substr(0, a));
  const double stop = parse_double(range.substr(a + 1, b - a - 1));
  const double step = parse_double(range.substr(b + 1));
  if (!(step > 0.0)) throw ConfigError(ConfigError::Kind::Validation, "lengths", "step must be > 0");
  if (!(start >= 0.0)) throw ConfigError(ConfigError::Kind::Validation, "lengths", "start must be >= 0");
  std::vector<double> lengths;
  // Index-based so 0:150:5 lands exactly on 150 without float drift.
  const double span = (stop - start) / step;
  if (span < -1e-9) return lengths;
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) lengths.push_back(start + static_cast<double>(i) * step);
  return lengths;
}

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"DPSK quantum key distribution simulator", "dpskqkd"};
  app.set_version_flag("--version", report::kToolVersion);
  app.require_subcommand(1);

  Common common;

  auto* curve = app.add_subcommand("rate-curve", "secure key rate versus fiber length (CSV)");
  add_common(curve, common);
  std::string lengths_range;
  bool optimize = false;
  unsigned workers = default_workers();
  curve->add_option("--lengths", lengths_range, "start:stop:step in km, stop inclusive")
      ->required();
  curve->add_flag("--optimize-mu", optimize, "re-optimize mu at every length");
  curve->add_option("--workers", workers, "threads for the sweep")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trials (JSON)");
  add_common(simulate, common);
  std::uint64_t slots = 1'000'000;
  std::uint64_t seed = 1;
  unsigned repeat = 1;
  std::string hist_path;
  simulate->add_option("--slots", slots, "time slots per trial (>= 10000)");
  simulate->add_option("--seed", seed, "root seed");
  simulate->add_option("--repeat", repeat, "number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--hist", hist_path, "timing histogram CSV of the first trial");
  simulate->add_option("--workers", workers, "threads per trial")->check(CLI::PositiveNumber);

  auto* attack = app.add_subcommand("attack", "eavesdropper model (JSON)");
  add_common(attack, common);
  std::string attack_name;
  std::optional<double> qber;
  std::optional<double> ir_fraction;
  unsigned pns_block = 2;
  unsigned coherence = 100;
  attack->add_option("--attack", attack_name, "bs, ir, pns2 or hybrid")
      ->required()
      ->check(CLI::IsMember({"bs", "ir", "pns2", "hybrid"}));
  attack->add_option("--slots", slots, "time slots");
  attack->add_option("--seed", seed, "root seed");
  attack->add_option("--qber", qber, "innocent error rate e (default: modeled QBER)");
  attack->add_option("--ir-fraction", ir_fraction, "intercepted fraction (default: min(1, 4e))");
  attack->add_option("--pns-block", pns_block, "pulses per PNS block; > 2 is experimental");
  attack->add_option("--coherence", coherence, "pulses in Eve's coherent BS train");

  auto* optimum = app.add_subcommand("optimize-mu", "optimal mean photon number (JSON)");
  add_common(optimum, common);
  std::optional<double> length;
  optimum->add_option("--length", length, "fiber length in km (default: config)");

  auto* calibrate =
      app.add_subcommand("calibrate-jitter", "fit jitter core and tail to a QBER budget (JSON)");
  add_common(calibrate, common);
  double target_total = 0.0795;
  double target_dark = 0.055;
  calibrate->add_option("--total", target_total, "target total QBER");
  calibrate->add_option("--dark", target_dark, "target dark-count QBER share");

  auto* distance = app.add_subcommand("max-distance", "longest fiber with a positive rate (JSON)");
  add_common(distance, common);
  double ceiling = 500.0;
  distance->add_option("--ceiling", ceiling, "search ceiling in km");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << report::kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const SystemParams p = load(common);
    report::Provenance prov{config_hash(p), 0};

    if (*curve) {
      const auto lengths = parse_lengths(lengths_range);
      const auto points = opt::distance_sweep(p, lengths, optimize, workers);
      std::ostringstream body;
      report::write_rate_curve_csv(body, points, prov);
      emit(common, body.str(), out);
    } else if (*simulate) {
      if (slots < 10'000) {
        throw ConfigError(ConfigError::Kind::Validation, "slots", "must be >= 10000");
      }
      prov.seed = seed;
      sim::SimOptions opts;
      opts.workers = workers;
      const auto trials = sim::run_trials(p, slots, seed, repeat, opts);
      const auto summary = sim::summarize(trials);
      emit(common, report::trials_json(trials, summary, p, prov), out);
      if (!hist_path.empty()) {
        std::ofstream file(hist_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + hist_path);
        report::write_histogram_csv(file, trials.front().timing_histogram, prov);
      }
    } else if (*attack) {
      prov.seed = seed;
      eve::AttackConfig cfg;
      cfg.kind = eve::parse_attack_kind(attack_name);
      cfg.pns_block = pns_block;
      cfg.coherence_pulses = coherence;
      const double e = qber ? *qber : rates::qber_model(p).e_total;
      if (!(e >= 0.0 && e <= 0.5)) {
        throw ConfigError(ConfigError::Kind::Validation, "qber", "must be in [0, 0.5]");
      }
      cfg.ir_fraction = ir_fraction ? *ir_fraction : std::min(1.0, 4.0 * e);
      try {
        eve::validate(cfg);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ConfigError::Kind::Validation, "attack", ex.what());
      }
      const double ae = system_transmittance(p);
      eve::AttackReport r;
      std::vector<std::pair<std::string, double>> extra;
      switch (cfg.kind) {
        case eve::AttackKind::BS: {
          // One announced instance per expected click.
          const auto announced = static_cast<std::uint64_t>(
              std::llround(static_cast<double>(slots) * -std::expm1(-p.mu * ae)));
          r = eve::bs_attack(p.mu, ae, coherence, std::max<std::uint64_t>(announced, 1), seed);
          break;
        }
        case eve::AttackKind::IR:
          r = eve::ir_attack_fraction(p.mu, ae, cfg.ir_fraction, slots, seed);
          break;
        case eve::AttackKind::PNS2:
          r = eve::pns_attack(p.mu, pns_block, slots, seed);
          break;
        case eve::AttackKind::HYBRID: {
          r = eve::hybrid_attack(p.mu, ae, e, coherence, slots, seed);
          const double exponent = eve::hybrid_bound(p.mu, ae, e);
          extra = {{"qber", e}, {"bound_exponent", exponent}, {"tau1", rates::tau1(p.mu, ae, e)}};
          break;
        }
      }
      emit(common, report::attack_json(r, p, prov, extra), out);
    } else if (*optimum) {
      SystemParams q = p;
      if (length) {
        q.channel.fiber_length = *length;
        validate(q);
      }
      try {
        const auto best = opt::optimize_mu(q);
        emit(common, report::optimum_json(best.mu, best.point, prov), out);
      } catch (const opt::NoPositiveRate&) {
        err << "no positive secure rate at " << report::fmt6(q.channel.fiber_length)
            << " km for any mu in (0, 0.5)\n";
        return kExitNoRate;
      }
    } else if (*calibrate) {
      rates::JitterCalibration cal;
      try {
        cal = rates::calibrate_jitter(p, target_total, target_dark);
      } catch (const std::runtime_error& ex) {
        throw ConfigError(ConfigError::Kind::Validation, "total", ex.what());
      }
      emit(common, report::calibration_json(cal, prov), out);
    } else if (*distance) {
      try {
        emit(common, report::max_distance_json(opt::max_secure_distance(p, ceiling), prov), out);
      } catch (const opt::NoPositiveRate&) {
        err << "no positive secure rate at any length\n";
        return kExitNoRate;
      } catch (const opt::Unbounded& ex) {
        err << "secure rate still positive at the " << report::fmt6(ex.ceiling_km())
            << " km ceiling\n";
        return kExitNoRate;
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}

}  // namespace dpskqkd
