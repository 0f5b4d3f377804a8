#pragma once

#include <complex>

namespace fpt {

using cplx = std::complex<double>;

class ProcessSpec;

/// Value of a special function together with a bound on its absolute error.
struct SpecfunResult {
  cplx value{};
  double est_error = 0.0;  ///< absolute error estimate (rounding + truncation)
  int terms_used = 0;

  double relative_error() const;
};

struct SeriesOptions {
  int max_terms = 20000;
  /// Evaluation fails with NumericError when the estimated relative error
  /// exceeds this after all fallbacks have been tried.
  double max_rel_error = 1e-12;
};

/// log Gamma(z) for complex z (Lanczos approximation, reflection for Re z < 1/2).
/// The imaginary part is only defined modulo 2*pi. Throws DomainError at poles.
cplx log_gamma(cplx z);

/// 1/Gamma(z); entire, exactly zero at the non-positive integers.
cplx rgamma(cplx z);

/// Kummer confluent hypergeometric function 1F1(a; b; z) by its power series.
/// When Re z < 0 and the direct series cancels badly, the Kummer
/// transformation e^z 1F1(b-a; b; -z) is tried instead.
SpecfunResult kummer_1f1(cplx a, cplx b, cplx z, const SeriesOptions& opts = {});

/// Parabolic cylinder function D_nu(z) for complex order and real |z| <= 10,
/// built from the even/odd 1F1 pair with Gamma-function weights.
SpecfunResult parabolic_cylinder_d(cplx nu, double z, const SeriesOptions& opts = {});

enum class Side { Plus, Minus };

/// u^{+/-}_s(y0) = exp(y0^2 / 4b^2) D_{-tau s}(+/- y0 / b) for an OU process.
/// The Gaussian prefactors cancel analytically, so nothing is exponentiated.
SpecfunResult u_pm(const ProcessSpec& p, Side side, cplx s, double y0);

/// u^{side}_s(y_num) / u^{side}_s(y_den) without forming the (possibly
/// under- or overflowing) common Gamma-function scale.
SpecfunResult u_pm_ratio(const ProcessSpec& p, Side side, cplx s, double y_num,
                         double y_den);

}  // namespace fpt
