#include "dpsk/optimize.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "dpsk/timing.hpp"

namespace dpsk::opt {

namespace {

constexpr int kGridPoints = 200;
constexpr double kMuMax = 0.5;
constexpr double kTolerance = 1e-7;

MuOptimum optimize_with(SystemParams p, const GateAcceptance& acc) {
  auto rate_at = [&](double mu) {
    p.mu = mu;
    return rates::evaluate(p, acc).r_secure;
  };

  int best = -1;
  double best_rate = 0.0;
  for (int i = 1; i <= kGridPoints; ++i) {
    const double r = rate_at(kMuMax * i / (kGridPoints + 1));
    if (r > best_rate) {  // strict: ties keep the smaller μ
      best_rate = r;
      best = i;
    }
  }
  if (best < 0) throw NoPositiveRate();

  // Golden-section search on the grid cell pair around the best node.
  double lo = kMuMax * (best - 1) / (kGridPoints + 1);
  double hi = kMuMax * (best + 1) / (kGridPoints + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = rate_at(x1);
  double f2 = rate_at(x2);
  while (hi - lo > kTolerance) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = rate_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = rate_at(x2);
    }
  }

  double mu_star = 0.5 * (lo + hi);
  if (rate_at(mu_star) < best_rate) mu_star = kMuMax * best / (kGridPoints + 1);
  p.mu = mu_star;
  return {mu_star, rates::evaluate(p, acc)};
}

bool has_positive_rate(SystemParams p, double length, const GateAcceptance& acc) {
  p.channel.fiber_length = length;
  try {
    optimize_with(p, acc);
    return true;
  } catch (const NoPositiveRate&) {
    return false;
  }
}

}  // namespace

MuOptimum optimize_mu(const SystemParams& p) { return optimize_with(p, gate_acceptance(p)); }

std::vector<rates::RatePoint> distance_sweep(const SystemParams& base,
                                             std::span<const double> lengths, bool optimize,
                                             unsigned workers) {
  const auto acc = gate_acceptance(base);
  std::vector<rates::RatePoint> out(lengths.size());

  auto point_at = [&](std::size_t i) {
    SystemParams p = base;
    p.channel.fiber_length = lengths[i];
    if (optimize) {
      try {
        return optimize_with(p, acc).point;
      } catch (const NoPositiveRate&) {
        // Past the knee: report the template μ with its clamped zero rate.
      }
    }
    return rates::evaluate(p, acc);
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(lengths.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < lengths.size(); ++i) out[i] = point_at(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < lengths.size(); i = next++) out[i] = point_at(i);
    });
  }
  pool.clear();
  return out;
}

double max_secure_distance(const SystemParams& base, double ceiling_km) {
  const auto acc = gate_acceptance(base);
  if (has_positive_rate(base, ceiling_km, acc)) throw Unbounded(ceiling_km);
  if (!has_positive_rate(base, 0.0, acc)) throw NoPositiveRate();
  double lo = 0.0;
  double hi = ceiling_km;
  while (hi - lo > 0.05) {
    const double mid = 0.5 * (lo + hi);
    (has_positive_rate(base, mid, acc) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace dpsk::opt
