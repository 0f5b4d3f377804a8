#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fpt/laplace.hpp"
#include "fpt/process.hpp"

namespace fpt {

/// Which absorbing boundary the density refers to.
enum class Target { Lower, Upper };

std::string to_string(Target target);

/// Sampled first-passage density with provenance.
struct DensityCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> errors;  ///< absolute error estimate per point (0 when not tracked)
  std::string method;          ///< "laplace-N", "series-N", "moving-N", "eigen", "mc"
  int trunc_order = 0;
  double min_value = 0.0;
  int negative_count = 0;  ///< points below -1e-9 (reported, never clamped)
  std::vector<std::string> warnings;

  /// Recomputes min_value / negative_count from values.
  void scan_negatives();
};

/// Laplace transform of the n-th filtration term f^(n)(s; x0 => 0).
cplx f_n_laplace(const ProcessSpec& p, int n, double x0, double L, cplx s);

/// Two-boundary transform F_II(s; x0 => 0) from the N-step closed form (N even).
cplx ftwo_laplace(const ProcessSpec& p, double x0, double L, cplx s, int N = 2);

/// Same, with an absolute error estimate (non-zero for OU kernels).
KernelValue ftwo_laplace_value(const ProcessSpec& p, double x0, double L, cplx s, int N = 2);

/// The transform above as an invertible kernel, for either target.
LaplaceKernel ftwo_kernel(const ProcessSpec& p, double x0, double L, Target target, int N = 2);

/// Individual filtration terms f^(n)(t), n = 0..N-1, unsigned.
struct FiltrationTerms {
  std::vector<double> times;
  std::vector<std::vector<double>> terms;  ///< terms[n][i] = f^(n)(times[i])
  std::vector<std::vector<double>> errors; ///< absolute error per term (ILT-backed only)
};

struct FiltrationOptions {
  int N = 0;                ///< truncation order; 0 selects it automatically
  int max_order = 60;       ///< cap for automatic selection
  double auto_tol = 1e-12;  ///< OU auto-N: omitted term below this times sup f^(0)
  int talbot_nodes = 32;
};

/// Terms for the density at `target`. Closed-form images for Free/Biased,
/// inverse Laplace transforms of the kernel products for OU.
FiltrationTerms filtration_terms(const ProcessSpec& p, double x0, double L, Target target,
                                 const std::vector<double>& times, int N, int talbot_nodes = 32);

/// Partial sum sum_{n<N} (-1)^n f^(n)(t; x0 => 0) at a single time.
double ftwo_series_time(const ProcessSpec& p, double x0, double L, double t, int N);

/// Smallest N with t*_(N-1) beyond t_max (Free/Biased only).
int auto_order(const ProcessSpec& p, double x0, double L, double t_max);

/// Series density on a grid, with the ratio diagnostic folded into the
/// curve's warnings. Throws ConvergenceError when automatic order
/// selection cannot make the ratio drop below 1 within max_order.
DensityCurve ftwo_series_curve(const ProcessSpec& p, double x0, double L, Target target,
                               const std::vector<double>& times, const FiltrationOptions& opts = {});

/// Laplace-domain route: fixed-Talbot inversion of the N-step closed form.
DensityCurve ftwo_laplace_curve(const ProcessSpec& p, double x0, double L, Target target,
                                const std::vector<double>& times, int N = 2, int talbot_nodes = 32);

struct RatioReport {
  int n = 0;                    ///< ratio taken between terms n+1 and n
  double max_ratio = 0.0;       ///< max over grid of |f^(n+1) / f^(n)|
  double omitted_sup = 0.0;     ///< sup over grid of |f^(n+1)|
};

/// Ratio test on the last two computed terms. `terms` must hold n+2 rows.
RatioReport ratio_diagnostic(const FiltrationTerms& terms, int n);

/// Free diffusion between two linearly moving absorbing boundaries.
struct MovingOptions {
  double dt = 0.0;        ///< 0: horizon / 4000
  int max_order = 60;
  double conv_tol = 1e-9; ///< stop once sup |g^(N)| falls below this
  int N = 0;              ///< fixed order; 0 iterates until conv_tol
};

struct MovingResult {
  DensityCurve lower;
  DensityCurve upper;
  std::vector<double> last_term_sup;  ///< sup |g^(n)| per level, both boundaries
};

MovingResult ftwo_moving(const ProcessSpec& p, double x0, const MovingBoundaries& mb, double t_end,
                         const MovingOptions& opts = {});

/// Probability of reaching `target` before the other boundary.
double splitting_probability(const ProcessSpec& p, double x0, double L, Target target = Target::Lower);

/// Cumulative probability of absorption at `target` by time t, by inverting F_II(s)/s.
double cumulative_absorption(const ProcessSpec& p, double x0, double L, Target target, double t,
                             int talbot_nodes = 32);

}  // namespace fpt
