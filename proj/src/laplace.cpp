#include "fpt/laplace.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fpt/errors.hpp"

namespace fpt {

namespace {

constexpr double kPi = std::numbers::pi;

// Node weights below this magnitude cannot affect a double result; kernel
// failures there (far-left contour tail) are tolerated.
constexpr double kNegligibleWeight = 1e-30;

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << "inverse Laplace transform requires t > 0 (got " << t << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

LaplaceKernel LaplaceKernel::from(std::function<cplx(cplx)> f, double singularity_bound) {
  return {[f = std::move(f)](cplx s) { return KernelValue{f(s), 0.0}; }, singularity_bound};
}

std::vector<InversionResult> invert_talbot_many(
    const std::function<void(cplx, std::span<KernelValue>)>& evaluate, std::size_t count, double t,
    int nodes, double singularity_bound) {
  require_time(t);
  require_valid(nodes >= 2, "Talbot needs at least 2 nodes");
  const double shift = std::max(0.0, singularity_bound);
  const double r = 2.0 * nodes / (5.0 * t);

  std::vector<cplx> sum(count, 0.0);
  std::vector<double> err(count, 0.0);
  std::vector<KernelValue> buf(count);
  int skipped = 0;

  auto accumulate = [&](cplx s, cplx weight) {
    try {
      evaluate(s + shift, buf);
    } catch (const std::exception&) {
      if (std::abs(weight) * r / nodes < kNegligibleWeight) {
        ++skipped;
        return;
      }
      throw;
    }
    for (std::size_t j = 0; j < count; ++j) {
      sum[j] += weight * buf[j].value;
      err[j] += std::abs(weight) * buf[j].est_error;
    }
  };

  // theta = 0 endpoint carries half weight.
  accumulate(r, 0.5 * std::exp(r * t));
  for (int k = 1; k < nodes; ++k) {
    const double theta = k * kPi / nodes;
    const double cot = 1.0 / std::tan(theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    const cplx s(r * theta * cot, r * theta);
    const cplx e = std::exp(s * t);
    // Both halves of the contour, so the imaginary part measures how far
    // F(conj s) deviates from conj F(s).
    accumulate(s, 0.5 * e * cplx(1.0, sigma));
    accumulate(std::conj(s), 0.5 * std::conj(e) * cplx(1.0, -sigma));
  }

  const double scale = r / nodes * std::exp(shift * t);
  std::vector<InversionResult> out(count);
  for (std::size_t j = 0; j < count; ++j) {
    InversionResult& res = out[j];
    res.value = scale * sum[j].real();
    res.imag_residue = scale * std::abs(sum[j].imag());
    res.error_estimate = scale * err[j];
    if (res.imag_residue > 1e-8 * std::abs(res.value) && res.imag_residue > 1e-300) {
      res.warning = true;
      res.note = "imaginary residue above 1e-8 of the result";
    }
    if (skipped > 0) {
      res.note += (res.note.empty() ? "" : "; ") + std::to_string(skipped) +
                  " negligible contour nodes skipped after kernel failure";
    }
  }
  return out;
}

InversionResult invert_talbot(const LaplaceKernel& kernel, double t, int nodes) {
  require_valid(static_cast<bool>(kernel.evaluator), "Laplace kernel has no evaluator");
  auto eval = [&](cplx s, std::span<KernelValue> out) { out[0] = kernel.evaluator(s); };
  return invert_talbot_many(eval, 1, t, nodes, kernel.singularity_bound).front();
}

std::vector<double> stehfest_weights(int order) {
  require_valid(order >= 2 && order % 2 == 0, "Gaver-Stehfest order must be even and >= 2");
  const int half = order / 2;
  std::vector<double> v(order);
  auto fact = [](int n) { return std::tgamma(static_cast<long double>(n) + 1.0L); };
  for (int k = 1; k <= order; ++k) {
    long double acc = 0.0L;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      acc += std::pow(static_cast<long double>(j), half) * fact(2 * j) /
             (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
    }
    v[k - 1] = static_cast<double>(((k + half) % 2 == 0 ? 1.0L : -1.0L) * acc);
  }
  return v;
}

namespace {

double stehfest_sum(const LaplaceKernel& kernel, double t, int order) {
  const std::vector<double> w = stehfest_weights(order);
  const double a = std::log(2.0) / t;
  double acc = 0.0;
  for (int k = 1; k <= order; ++k) acc += w[k - 1] * kernel.evaluator(cplx(k * a, 0.0)).value.real();
  return a * acc;
}

}  // namespace

InversionResult invert_gaver_stehfest(const LaplaceKernel& kernel, double t, int order,
                                      double agreement_tol) {
  require_time(t);
  require_valid(static_cast<bool>(kernel.evaluator), "Laplace kernel has no evaluator");
  require_valid(order >= 4 && order % 2 == 0, "Gaver-Stehfest order must be even and >= 4");
  InversionResult res;
  res.value = stehfest_sum(kernel, t, order);
  const double lower = stehfest_sum(kernel, t, order - 2);
  res.error_estimate = std::abs(res.value - lower);
  if (res.error_estimate > agreement_tol * std::max(1.0, std::abs(res.value))) {
    res.warning = true;
    std::ostringstream msg;
    msg << "orders " << order << " and " << order - 2 << " disagree by " << res.error_estimate;
    res.note = msg.str();
  }
  return res;
}

ResidueSeriesResult sinh_ratio_series(double B, double A, double t, int modes, double tolerance) {
  require_domain(B > 0.0 && B < A, "sinh_ratio_series requires 0 < B < A");
  require_domain(t > 0.0, "sinh_ratio_series requires t > 0");
  require_valid(modes >= 1, "sinh_ratio_series needs at least one mode");
  const double k = kPi / A;
  double acc = 0.0;
  for (int n = 1; n <= modes; ++n) {
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    acc += 2.0 * sign * (n * kPi / (A * A)) * std::sin(n * kPi * B / A) *
           std::exp(-(n * k) * (n * k) * t);
  }
  ResidueSeriesResult res;
  res.value = acc;
  res.modes = modes;
  const int m = modes + 1;
  const double first = 2.0 * (m * kPi / (A * A)) * std::exp(-(m * k) * (m * k) * t);
  // Consecutive term-bound ratio, decreasing in n; the tail is geometric once it is < 1.
  const double q = (double(m + 1) / m) * std::exp(-(2.0 * m + 1.0) * k * k * t);
  res.omitted_bound = q < 1.0 ? first / (1.0 - q) : std::numeric_limits<double>::infinity();
  res.warning = res.omitted_bound > tolerance;
  return res;
}

int sinh_ratio_default_modes(double A, double t_min) {
  require_domain(A > 0.0 && t_min > 0.0, "sinh_ratio_default_modes requires A, t_min > 0");
  const double target = -std::log(1e-14);
  return std::max(1, static_cast<int>(std::ceil(A / kPi * std::sqrt(target / t_min))));
}

}  // namespace fpt
