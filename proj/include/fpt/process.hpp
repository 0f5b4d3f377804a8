#pragma once

#include <complex>
#include <string>

namespace fpt {

using cplx = std::complex<double>;

enum class ProcessKind { Free, Biased, OU };

std::string to_string(ProcessKind kind);

/// One of the three overdamped Langevin models dx/dt = -U'(x)/gamma + xi(t),
/// <xi(t) xi(s)> = 2 D delta(t - s).
///
///   Free:   U = 0
///   Biased: U = -alpha x, constant drift v = alpha / gamma
///   OU:     U = k (x - a)^2 / 2, relaxation time tau = gamma / k, b^2 = D tau
///
/// Derived quantities are computed on demand from the primaries.
class ProcessSpec {
 public:
  static ProcessSpec free(double diffusion);
  /// Biased diffusion parameterized directly by its drift velocity v.
  static ProcessSpec biased(double diffusion, double drift);
  /// Biased diffusion from the potential slope: U(x) = -alpha x, v = alpha / gamma.
  static ProcessSpec biased_from_slope(double diffusion, double alpha, double gamma);
  static ProcessSpec ornstein_uhlenbeck(double diffusion, double gamma, double spring,
                                        double center);

  ProcessKind kind() const { return kind_; }
  double diffusion() const { return diffusion_; }
  /// Constant drift v; zero for free diffusion. Not defined for OU.
  double drift() const;
  double friction() const { return gamma_; }
  double spring() const;
  double center() const;
  double relaxation_time() const;  ///< tau = gamma / k
  double ou_length_sq() const;     ///< b^2 = D tau

  /// Deterministic velocity -U'(x)/gamma at position x.
  double velocity_at(double x) const;

  /// The same physics seen in the reflected coordinate x' = L - x.
  ProcessSpec mirrored(double L) const;

 private:
  ProcessSpec() = default;

  ProcessKind kind_ = ProcessKind::Free;
  double diffusion_ = 1.0;
  double gamma_ = 1.0;
  double drift_ = 0.0;
  double spring_ = 0.0;
  double center_ = 0.0;
};

/// Absorbing boundaries at 0 and L.
struct StaticBoundaries {
  double L = 1.0;

  void validate() const;
  void validate_start(double x0) const;  ///< 0 < x0 < L
};

/// A boundary moving as B(t) = origin + velocity * t.
struct LinearTrajectory {
  double origin = 0.0;
  double velocity = 0.0;

  double at(double t) const { return origin + velocity * t; }
};

/// Lower boundary v0 t and upper boundary L + vL t.
struct MovingBoundaries {
  double L = 1.0;
  double v0 = 0.0;
  double vL = 0.0;

  LinearTrajectory lower() const { return {0.0, v0}; }
  LinearTrajectory upper() const { return {L, vL}; }
  double gap(double t) const { return L + (vL - v0) * t; }
  /// Time at which the boundaries meet; +inf when they never do.
  double collapse_time() const;
  bool is_static() const { return v0 == 0.0 && vL == 0.0; }

  void validate() const;
  void validate_start(double x0) const;
  /// Throws DomainError unless gap(t) > 0 for all t in [0, t_end].
  void validate_horizon(double t_end) const;
};

/// Free-space propagator P(x, t | x0, t0) for Free or Biased diffusion.
double transition_density(const ProcessSpec& p, double x, double t, double x0, double t0 = 0.0);

/// Laplace transform of the one-boundary first-passage density A => B.
cplx fpt_one_boundary_laplace(const ProcessSpec& p, double A, double B, cplx s);

/// Natural log of the Free/Biased one-boundary transform; avoids underflow
/// and keeps 1 - F accurate as s -> 0.
cplx log_fpt_one_boundary_laplace(const ProcessSpec& p, double A, double B, cplx s);

/// One-boundary first-passage density in time. Closed form for Free and
/// Biased; numerical inverse Laplace transform for OU.
double fpt_one_boundary_time(const ProcessSpec& p, double A, double B, double t);

/// First-passage density from A at time t0 to a linearly moving boundary,
/// reached at time t (free diffusion with coefficient D).
double moving_boundary_kernel(double t0, double A, double t, const LinearTrajectory& B,
                              double diffusion);

/// Time of the maximum of the n-th filtration term f^(n)(t; x0 => 0), the
/// free-space image at distance L n + x0 (n even) or L (n + 1) - x0 (n odd).
double characteristic_time(const ProcessSpec& p, int n, double x0, double L);

/// Horizon for normalization checks: slowest relaxation scale times `factor`.
double normalization_horizon(const ProcessSpec& p, double L, double factor = 20.0);

}  // namespace fpt
