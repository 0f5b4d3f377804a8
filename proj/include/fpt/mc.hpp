#pragma once

#include <cstdint>
#include <vector>

#include "fpt/filtration.hpp"
#include "fpt/process.hpp"

namespace fpt {

struct McConfig {
  double dt = 0.0;            ///< 0: 1e-4 L^2 / D
  long n_traj = 100000;
  std::uint64_t seed = 1;
  bool bridge_correction = true;
  double horizon = 0.0;       ///< 0: collapse time, or 20 slowest relaxation times
  unsigned threads = 0;       ///< 0: hardware concurrency

  void validate() const;
};

struct FptSample {
  double hit_time = 0.0;
  Target which_boundary = Target::Lower;
};

struct McResult {
  std::vector<FptSample> samples;  ///< absorbed trajectories, in trajectory order
  long n_traj = 0;
  long censored = 0;               ///< still inside at the horizon
  double dt = 0.0;
  double horizon = 0.0;

  long count(Target target) const;
  double fraction(Target target) const;
  /// Binomial standard error of fraction(target).
  double fraction_sigma(Target target) const;
};

/// Euler-Maruyama paths of dx = v(x) dt + sqrt(2 D dt) N(0, 1) between
/// absorbing boundaries. Trajectory i draws from its own stream seeded by
/// (seed, i), so results do not depend on the thread count.
McResult simulate(const ProcessSpec& p, const MovingBoundaries& mb, double x0, const McConfig& cfg);
McResult simulate(const ProcessSpec& p, const StaticBoundaries& sb, double x0, const McConfig& cfg);

struct Histogram {
  std::vector<double> edges;
  std::vector<long> counts;
  long n_traj = 0;
  /// Bin centres and count / (n_traj * width): integrates to the filtered fraction.
  DensityCurve density;
};

/// Histogram of hit times at `target` over [t_lo, t_hi] (t_hi <= 0: last hit time).
Histogram histogram(const McResult& mc, int bins, Target target, double t_lo = 0.0, double t_hi = 0.0);

}  // namespace fpt
