#pragma once

#include <memory>
#include <vector>

#include "fpt/filtration.hpp"
#include "fpt/process.hpp"
#include "fpt/weber.hpp"

namespace fpt {

struct EigenValue {
  double value = 0.0;
  double omitted_bound = 0.0;  ///< magnitude bound on the dropped modes
  int modes = 0;
  bool warning = false;
};

/// Free diffusion, density at the lower boundary, M modes.
EigenValue ee_free(double t, double x0, double L, double D, int M);

/// Constant drift v, density at the lower boundary, M modes.
EigenValue ee_biased(double t, double x0, double L, double D, double v, int M);

/// One Dirichlet eigenmode of the OU Fokker-Planck operator on [0, L].
///
/// In xi = (x - a) / b the mode solves y'' = (xi^2/4 - s - 1/2) y and decays
/// as exp(-s t / tau). The shape is kept as the solution shot from the lower
/// boundary with unit slope; divide by sqrt(norm) for the orthonormal mode.
struct SpectrumEntry {
  int n = 0;
  double s = 0.0;
  double A = 0.0;         ///< Y = Y_even + A Y_odd; infinite for a purely odd mode
  double norm = 0.0;      ///< int_0^L shape(x)^2 dx
  double residual = 0.0;  ///< |det| / (|Ye0 Yo1| + |Ye1 Yo0|) at s
  int nodes = 0;          ///< interior zeros of the shape
  std::shared_ptr<const WeberPath<double>> shape;
};

struct OuSpectrum {
  ProcessSpec process;
  double L = 0.0;
  std::vector<SpectrumEntry> modes;

  double xi(double x) const;  ///< (x - a) / b
  /// Orthonormal eigenfunction Y_n(x) and its x-derivative.
  double eigenfunction(std::size_t i, double x) const;
  double eigenfunction_derivative(std::size_t i, double x) const;
};

struct SpectrumOptions {
  double root_tol = 1e-15;  ///< bisection stops at this relative width in s (or at ulp level)
  int max_refinements = 8;  ///< step halvings allowed after a missed root
};

/// Boundary determinant Y_even(xi0) Y_odd(xiL) - Y_even(xiL) Y_odd(xi0) at s.
double ou_determinant(const ProcessSpec& p, double L, double s);

/// First M eigenvalues, ordered, each checked against the Sturm node count.
OuSpectrum ou_spectrum(const ProcessSpec& p, double L, int M, const SpectrumOptions& opts = {});

/// First-passage density at `target` from the eigen expansion (outward flux).
EigenValue ee_ou_fpt(double t, const OuSpectrum& spec, double x0, Target target);

/// Reference curve for any process: closed forms for Free/Biased, the OU
/// spectrum otherwise. Method tag "eigen", trunc_order M.
DensityCurve ee_curve(const ProcessSpec& p, double x0, double L, Target target,
                      const std::vector<double>& times, int M);

/// int_t^inf of the eigen density (term by term).
double ee_tail_mass(const ProcessSpec& p, double x0, double L, Target target, double t, int M);

}  // namespace fpt
