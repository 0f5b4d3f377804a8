#include "fpt/mc.hpp"

#include <algorithm>
#include <cmath>
#include <boost/random/normal_distribution.hpp>
#include <random>
#include <sstream>

#include "fpt/errors.hpp"
#include "parallel.hpp"

namespace fpt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kBridgeCutoff = 37.0;

struct Outcome {
  bool absorbed = false;
  FptSample sample;
};

}  // namespace

void McConfig::validate() const {
  require_domain(dt >= 0.0 && std::isfinite(dt), "MC step dt must be positive");
  require_valid(n_traj >= 1, "MC needs at least one trajectory");
  require_domain(horizon >= 0.0, "MC horizon must be non-negative");
}

long McResult::count(Target target) const {
  return std::count_if(samples.begin(), samples.end(),
                       [target](const FptSample& s) { return s.which_boundary == target; });
}

double McResult::fraction(Target target) const { return double(count(target)) / double(n_traj); }

double McResult::fraction_sigma(Target target) const {
  const double f = fraction(target);
  return std::sqrt(f * (1.0 - f) / double(n_traj));
}

McResult simulate(const ProcessSpec& p, const MovingBoundaries& mb, double x0, const McConfig& cfg) {
  cfg.validate();
  mb.validate_start(x0);
  const double D = p.diffusion();
  const double dt = cfg.dt > 0.0 ? cfg.dt : 1e-4 * mb.L * mb.L / D;
  double horizon = cfg.horizon;
  if (horizon <= 0.0) {
    horizon = std::isfinite(mb.collapse_time()) ? mb.collapse_time()
              : mb.is_static()                  ? normalization_horizon(p, mb.L)
                                                : 100.0 * mb.L * mb.L / D;
  }
  const double noise = std::sqrt(2.0 * D * dt);
  const long steps = static_cast<long>(std::ceil(horizon / dt));
  const LinearTrajectory lower = mb.lower();
  const LinearTrajectory upper = mb.upper();

  std::vector<Outcome> outcomes(cfg.n_traj);
  auto run = [&](std::size_t i) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(i)));
    boost::random::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double x = x0;
    double lo_old = lower.at(0.0), up_old = upper.at(0.0);
    for (long k = 1; k <= steps; ++k) {
      const double t = k * dt;
      const double xn = x + p.velocity_at(x) * dt + noise * gauss(rng);
      const double lo = lower.at(t), up = upper.at(t);
      if (xn <= lo) {
        outcomes[i] = {true, {t, Target::Lower}};
        return;
      }
      if (xn >= up) {
        outcomes[i] = {true, {t, Target::Upper}};
        return;
      }
      if (cfg.bridge_correction) {
        // Probability that the Brownian bridge from x to xn touched a
        // linearly moving level in between.
        // Exponents beyond kBridgeCutoff give p < 1e-16 and are skipped.
        const double e_lo = (x - lo_old) * (xn - lo) / (D * dt);
        if (e_lo < kBridgeCutoff && unif(rng) < std::exp(-e_lo)) {
          outcomes[i] = {true, {t, Target::Lower}};
          return;
        }
        const double e_up = (up_old - x) * (up - xn) / (D * dt);
        if (e_up < kBridgeCutoff && unif(rng) < std::exp(-e_up)) {
          outcomes[i] = {true, {t, Target::Upper}};
          return;
        }
      }
      x = xn;
      lo_old = lo;
      up_old = up;
    }
  };

  const std::size_t n = static_cast<std::size_t>(cfg.n_traj);
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  auto chunk = [&](std::size_t c) {
    for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) run(i);
  };
  if (cfg.threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) chunk(c);
  } else {
    detail::parallel_for(chunks, chunk);
  }

  McResult res;
  res.n_traj = cfg.n_traj;
  res.dt = dt;
  res.horizon = horizon;
  for (const Outcome& o : outcomes) {
    if (o.absorbed) {
      res.samples.push_back(o.sample);
    } else {
      ++res.censored;
    }
  }
  return res;
}

McResult simulate(const ProcessSpec& p, const StaticBoundaries& sb, double x0, const McConfig& cfg) {
  return simulate(p, MovingBoundaries{sb.L, 0.0, 0.0}, x0, cfg);
}

Histogram histogram(const McResult& mc, int bins, Target target, double t_lo, double t_hi) {
  require_valid(bins >= 1, "histogram needs at least one bin");
  std::vector<double> hits;
  for (const FptSample& s : mc.samples) {
    if (s.which_boundary == target) hits.push_back(s.hit_time);
  }
  if (hits.empty()) {
    throw NumericError("histogram: no samples reached the " + to_string(target) + " boundary");
  }
  if (t_hi <= 0.0) t_hi = *std::max_element(hits.begin(), hits.end());
  require_valid(t_hi > t_lo, "histogram range is empty");

  Histogram h;
  h.n_traj = mc.n_traj;
  h.edges.resize(bins + 1);
  for (int k = 0; k <= bins; ++k) h.edges[k] = t_lo + (t_hi - t_lo) * k / bins;
  h.counts.assign(bins, 0);
  const double width = (t_hi - t_lo) / bins;
  for (double t : hits) {
    if (t < t_lo || t > t_hi) continue;
    const int k = std::min(bins - 1, static_cast<int>((t - t_lo) / width));
    ++h.counts[k];
  }
  DensityCurve& c = h.density;
  c.method = "mc";
  c.trunc_order = static_cast<int>(mc.n_traj);
  for (int k = 0; k < bins; ++k) {
    const double w = h.edges[k + 1] - h.edges[k];
    c.times.push_back(0.5 * (h.edges[k] + h.edges[k + 1]));
    c.values.push_back(double(h.counts[k]) / (double(mc.n_traj) * w));
    const double pk = double(h.counts[k]) / double(mc.n_traj);
    c.errors.push_back(std::sqrt(pk * (1.0 - pk) / double(mc.n_traj)) / w);
  }
  c.scan_negatives();
  return h;
}

}  // namespace fpt
