#include "fpt/process.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fpt/errors.hpp"
#include "fpt/laplace.hpp"
#include "fpt/specfun.hpp"

namespace fpt {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << name << " must be positive and finite (got " << v << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

std::string to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::Free: return "free";
    case ProcessKind::Biased: return "biased";
    case ProcessKind::OU: return "ou";
  }
  return "unknown";
}

ProcessSpec ProcessSpec::free(double diffusion) {
  require_positive(diffusion, "D");
  ProcessSpec p;
  p.kind_ = ProcessKind::Free;
  p.diffusion_ = diffusion;
  return p;
}

ProcessSpec ProcessSpec::biased(double diffusion, double drift) {
  require_positive(diffusion, "D");
  require_domain(std::isfinite(drift), "drift must be finite");
  ProcessSpec p;
  p.kind_ = ProcessKind::Biased;
  p.diffusion_ = diffusion;
  p.drift_ = drift;
  return p;
}

ProcessSpec ProcessSpec::biased_from_slope(double diffusion, double alpha, double gamma) {
  require_positive(gamma, "gamma");
  ProcessSpec p = biased(diffusion, alpha / gamma);
  p.gamma_ = gamma;
  return p;
}

ProcessSpec ProcessSpec::ornstein_uhlenbeck(double diffusion, double gamma, double spring,
                                            double center) {
  require_positive(diffusion, "D");
  require_positive(gamma, "gamma");
  require_positive(spring, "k");
  require_domain(std::isfinite(center), "potential minimum a must be finite");
  ProcessSpec p;
  p.kind_ = ProcessKind::OU;
  p.diffusion_ = diffusion;
  p.gamma_ = gamma;
  p.spring_ = spring;
  p.center_ = center;
  return p;
}

double ProcessSpec::drift() const {
  require_domain(kind_ != ProcessKind::OU, "drift is not constant for an OU process");
  return kind_ == ProcessKind::Biased ? drift_ : 0.0;
}

double ProcessSpec::spring() const {
  require_domain(kind_ == ProcessKind::OU, "spring constant is only defined for OU");
  return spring_;
}

double ProcessSpec::center() const {
  require_domain(kind_ == ProcessKind::OU, "potential minimum is only defined for OU");
  return center_;
}

double ProcessSpec::relaxation_time() const { return gamma_ / spring(); }

double ProcessSpec::ou_length_sq() const { return diffusion_ * relaxation_time(); }

double ProcessSpec::velocity_at(double x) const {
  switch (kind_) {
    case ProcessKind::Free: return 0.0;
    case ProcessKind::Biased: return drift_;
    case ProcessKind::OU: return -(x - center_) / relaxation_time();
  }
  return 0.0;
}

ProcessSpec ProcessSpec::mirrored(double L) const {
  ProcessSpec p = *this;
  if (kind_ == ProcessKind::Biased) p.drift_ = -drift_;
  if (kind_ == ProcessKind::OU) p.center_ = L - center_;
  return p;
}

void StaticBoundaries::validate() const { require_positive(L, "L"); }

void StaticBoundaries::validate_start(double x0) const {
  validate();
  if (!(x0 > 0.0 && x0 < L)) {
    std::ostringstream msg;
    msg << "initial position x0=" << x0 << " must lie strictly inside (0, " << L << ")";
    throw DomainError(msg.str());
  }
}

double MovingBoundaries::collapse_time() const {
  const double closing = v0 - vL;
  if (closing <= 0.0) return std::numeric_limits<double>::infinity();
  return L / closing;
}

void MovingBoundaries::validate() const {
  require_positive(L, "L");
  require_domain(std::isfinite(v0) && std::isfinite(vL), "boundary velocities must be finite");
}

void MovingBoundaries::validate_start(double x0) const {
  validate();
  if (!(x0 > 0.0 && x0 < L)) {
    std::ostringstream msg;
    msg << "initial position x0=" << x0 << " must lie strictly inside (0, " << L << ")";
    throw DomainError(msg.str());
  }
}

void MovingBoundaries::validate_horizon(double t_end) const {
  if (!(gap(t_end) > 0.0) || !(t_end < collapse_time())) {
    std::ostringstream msg;
    msg << "boundaries collapse at t=" << collapse_time() << ", before the requested end t="
        << t_end;
    throw DomainError(msg.str());
  }
}

double transition_density(const ProcessSpec& p, double x, double t, double x0, double t0) {
  require_domain(p.kind() != ProcessKind::OU,
                 "transition_density is implemented for free and biased diffusion");
  const double dt = t - t0;
  require_domain(dt > 0.0, "transition_density requires t > t0");
  const double D = p.diffusion();
  const double mean = x0 + p.drift() * dt;
  const double dx = x - mean;
  return std::exp(-dx * dx / (4.0 * D * dt)) / std::sqrt(4.0 * kPi * D * dt);
}

cplx log_fpt_one_boundary_laplace(const ProcessSpec& p, double A, double B, cplx s) {
  require_domain(p.kind() != ProcessKind::OU, "log kernel is closed-form only for free/biased");
  const double D = p.diffusion();
  const double v = p.drift();
  const double dist = std::abs(B - A);
  // exp[-(sqrt(4 D s + v^2) |B - A| - (B - A) v) / 2D]; v = 0 gives exp(-|B-A| sqrt(s/D)).
  const cplx root = std::sqrt(4.0 * D * s + v * v);
  return -(root * dist - (B - A) * v) / (2.0 * D);
}

cplx fpt_one_boundary_laplace(const ProcessSpec& p, double A, double B, cplx s) {
  if (p.kind() != ProcessKind::OU) {
    if (A == B) return 1.0;
    return std::exp(log_fpt_one_boundary_laplace(p, A, B, s));
  }
  if (A == B) return 1.0;
  const double a = p.center();
  const Side side = A <= B ? Side::Minus : Side::Plus;
  return u_pm_ratio(p, side, s, A - a, B - a).value;
}

double fpt_one_boundary_time(const ProcessSpec& p, double A, double B, double t) {
  require_domain(t > 0.0, "fpt_one_boundary_time requires t > 0");
  if (A == B) return 0.0;
  if (p.kind() == ProcessKind::OU) {
    LaplaceKernel kernel{[&](cplx s) {
      const double a = p.center();
      const Side side = A <= B ? Side::Minus : Side::Plus;
      const SpecfunResult r = u_pm_ratio(p, side, s, A - a, B - a);
      return KernelValue{r.value, r.est_error};
    }};
    return invert_talbot(kernel, t).value;
  }
  const double D = p.diffusion();
  const double v = p.drift();
  const double d = A - B;
  return std::abs(d) / std::sqrt(4.0 * kPi * D * t * t * t) *
         std::exp(-(d + v * t) * (d + v * t) / (4.0 * D * t));
}

double moving_boundary_kernel(double t0, double A, double t, const LinearTrajectory& B,
                              double diffusion) {
  require_positive(diffusion, "D");
  require_domain(t > t0, "moving_boundary_kernel requires t > t0");
  const double start_gap = B.at(t0) - A;
  require_domain(start_gap != 0.0, "walker starts on the moving boundary");
  const double dt = t - t0;
  const double reach = B.at(t) - A;
  return std::abs(start_gap) / std::sqrt(4.0 * kPi * diffusion * dt * dt * dt) *
         std::exp(-reach * reach / (4.0 * diffusion * dt));
}

double characteristic_time(const ProcessSpec& p, int n, double x0, double L) {
  require_domain(p.kind() != ProcessKind::OU,
                 "characteristic_time has a closed form only for free/biased diffusion");
  require_domain(n >= 0, "filtration index must be non-negative");
  StaticBoundaries{L}.validate_start(x0);
  const double d = (n % 2 == 0) ? L * n + x0 : L * (n + 1) - x0;
  const double D = p.diffusion();
  const double v = p.drift();
  // Root of v^2 t^2 + 6 D t - d^2 = 0, written without the cancellation of
  // (-3D + sqrt(9D^2 + v^2 d^2)) / v^2 as v -> 0.
  return d * d / (3.0 * D + std::sqrt(9.0 * D * D + v * v * d * d));
}

double normalization_horizon(const ProcessSpec& p, double L, double factor) {
  require_positive(L, "L");
  require_positive(factor, "factor");
  const double D = p.diffusion();
  double slowest = L * L / (D * kPi * kPi);
  if (p.kind() == ProcessKind::Biased) {
    const double pe = L * p.drift() / (2.0 * D);
    slowest = L * L / D / (kPi * kPi + pe * pe);
  }
  return factor * slowest;
}

}  // namespace fpt
