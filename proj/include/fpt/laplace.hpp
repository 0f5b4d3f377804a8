#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fpt {

using cplx = std::complex<double>;

/// A transform value with its absolute error estimate.
struct KernelValue {
  cplx value{};
  double est_error = 0.0;
};

/// Evaluator of a Laplace-domain function F(s).
///
/// Contract: the evaluator is deterministic and safe to call concurrently, and
/// every singularity of F has real part <= `singularity_bound`. All transforms
/// in this library have their singularities on the non-positive real axis.
struct LaplaceKernel {
  std::function<KernelValue(cplx)> evaluator;
  double singularity_bound = 0.0;

  static LaplaceKernel from(std::function<cplx(cplx)> f, double singularity_bound = 0.0);
};

struct InversionResult {
  double value = 0.0;
  double imag_residue = 0.0;  ///< |Im| of the full-contour sum; ~0 for a real f(t)
  double error_estimate = 0.0;
  bool warning = false;
  std::string note;
};

/// Fixed-Talbot inversion with `nodes` points on the deformed Bromwich contour
/// s(theta) = r theta (cot theta + i), r = 2 nodes / (5 t).
InversionResult invert_talbot(const LaplaceKernel& kernel, double t, int nodes = 32);

/// Vector form: inverts `count` transforms sharing the same contour nodes.
/// `evaluate(s, out)` fills out[0..count) with F_j(s) and their error estimates.
std::vector<InversionResult> invert_talbot_many(
    const std::function<void(cplx, std::span<KernelValue>)>& evaluate, std::size_t count, double t,
    int nodes = 32, double singularity_bound = 0.0);

/// Gaver-Stehfest inversion from real-axis samples F(k ln2 / t), k = 1..order.
/// Cross-check engine: flags a warning when orders `order` and `order - 2`
/// disagree by more than `agreement_tol`.
InversionResult invert_gaver_stehfest(const LaplaceKernel& kernel, double t, int order = 14,
                                      double agreement_tol = 1e-4);

/// Stehfest weights V_k for an even order.
std::vector<double> stehfest_weights(int order);

struct ResidueSeriesResult {
  double value = 0.0;
  double omitted_bound = 0.0;  ///< magnitude of the first omitted residue
  int modes = 0;
  bool warning = false;
};

/// Inverse transform of sinh(B sqrt s) / sinh(A sqrt s) as the sum over the
/// poles s_n = -(n pi / A)^2, truncated after `modes` residues.
ResidueSeriesResult sinh_ratio_series(double B, double A, double t, int modes,
                                      double tolerance = 1e-14);

/// Smallest mode count with exp(-(M pi / A)^2 t_min) < 1e-14.
int sinh_ratio_default_modes(double A, double t_min);

}  // namespace fpt
