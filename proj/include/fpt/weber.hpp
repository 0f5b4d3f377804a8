#pragma once

#include <complex>
#include <vector>

namespace fpt {

using cplx = std::complex<double>;

/// Solution of the Weber equation y''(z) = (z^2/4 - c) y(z) on a real segment,
/// integrated by local Taylor expansion. Each step re-expands about its start
/// point using the exact three-term coefficient recurrence, so the method has
/// no discretization error beyond series truncation (~1e-17 per step).
///
/// With c = nu + 1/2 the solutions are parabolic cylinder functions of order
/// nu; with c = s + 1/2 they are the OU eigenfunctions in scaled coordinates.
///
/// Values are stored as exp(log_scale) * y so paths through exponentially
/// growing regions never overflow.
template <typename T>
class WeberPath {
 public:
  struct Segment {
    double z0 = 0.0;
    double h = 0.0;  ///< signed step length
    double log_scale = 0.0;
    std::vector<T> coeffs;  ///< Taylor coefficients about z0, in units of exp(log_scale)
  };

  /// Integrates from z0 with initial data (exp(log_scale) * y0, exp(log_scale) * dy0)
  /// to z_end (either direction).
  WeberPath(T c, double z0, T y0, T dy0, double z_end, double log_scale = 0.0);

  T c() const { return c_; }
  double start() const { return z_start_; }
  double end() const { return z_end_; }

  /// Value at z between start and end, returned as (mantissa, log_scale).
  void evaluate(double z, T& y, T& dy, double& log_scale) const;
  T value(double z) const;
  T derivative(double z) const;

  /// Number of sign changes of Re y strictly between start and end.
  int sign_changes() const;

  const std::vector<Segment>& segments() const { return segments_; }
  int steps() const { return static_cast<int>(segments_.size()); }

 private:
  const Segment& locate(double z) const;

  T c_;
  double z_start_ = 0.0;
  double z_end_ = 0.0;
  std::vector<Segment> segments_;
};

extern template class WeberPath<double>;
extern template class WeberPath<cplx>;

/// D_nu(z) for z > 0 by the large-z asymptotic expansion at a far point and
/// inward integration of the Weber equation, in which direction D_nu is the
/// dominant solution. Returns the mantissa and log-scale of D_nu at each
/// requested point (all must be > 0 or at least below the start point), and a
/// relative error estimate.
struct RecessiveWeberValue {
  cplx mantissa;
  double log_scale = 0.0;
  double rel_error = 0.0;
};

std::vector<RecessiveWeberValue> parabolic_cylinder_inward(cplx nu, const std::vector<double>& zs);

/// The solution of y'' = (z^2/4 - c) y that decays as z -> +inf, started from
/// WKB data far out. Normalization is arbitrary but common to all points, so
/// only ratios are meaningful. Works for any |c|, unlike the asymptotic start.
std::vector<RecessiveWeberValue> weber_recessive(cplx c, const std::vector<double>& zs);

}  // namespace fpt
