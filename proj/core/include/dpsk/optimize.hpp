#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "dpsk/params.hpp"
#include "dpsk/rates.hpp"

namespace dpsk::opt {

/// No μ in (0, 0.5) yields a positive secure fraction.
class NoPositiveRate : public std::runtime_error {
 public:
  NoPositiveRate() : std::runtime_error("no positive rate") {}
};

/// The secure fraction is still positive at the search ceiling.
class Unbounded : public std::runtime_error {
 public:
  explicit Unbounded(double ceiling_km)
      : std::runtime_error("unbounded"), ceiling_km_(ceiling_km) {}
  double ceiling_km() const noexcept { return ceiling_km_; }

 private:
  double ceiling_km_;
};

struct MuOptimum {
  double mu = 0.0;
  rates::RatePoint point;
};

/// Maximizes the secure rate over μ ∈ (0, 0.5), with the QBER re-modeled at
/// every μ. A 200-point grid picks the bracket, golden-section search refines
/// it to 1e-7. Ties resolve toward the smaller μ. `p.mu` is ignored.
MuOptimum optimize_mu(const SystemParams& p);

/// One RatePoint per length, in input order. Lengths past the secure range
/// produce r_secure = 0 entries. `workers` > 1 evaluates points concurrently;
/// the output does not depend on it.
std::vector<rates::RatePoint> distance_sweep(const SystemParams& base,
                                             std::span<const double> lengths,
                                             bool optimize, unsigned workers = 1);

/// Largest fiber length (0.05 km resolution) with a positive secure fraction
/// at the optimal μ. Throws Unbounded if still positive at `ceiling_km`, and
/// NoPositiveRate if no length works.
double max_secure_distance(const SystemParams& base, double ceiling_km = 500.0);

}  // namespace dpsk::opt
