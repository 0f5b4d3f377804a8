#include "fpt/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fpt/errors.hpp"
#include "fpt/specfun.hpp"
#include "parallel.hpp"

namespace fpt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegativeFloor = -1e-9;

// exp(w) - 1 without cancellation for small |w|.
cplx expm1c(cplx w) {
  if (std::abs(w) < 1e-3) {
    return w * (1.0 + w / 2.0 * (1.0 + w / 3.0 * (1.0 + w / 4.0 * (1.0 + w / 5.0))));
  }
  return std::exp(w) - 1.0;
}

struct Oriented {
  ProcessSpec p;
  double x0;
};

Oriented orient(const ProcessSpec& p, double x0, double L, Target target) {
  if (target == Target::Lower) return {p, x0};
  return {p.mirrored(L), L - x0};
}

void require_order(int N) {
  if (N < 2 || N % 2 != 0) {
    std::ostringstream msg;
    msg << "closed N-step form needs an even N >= 2 (got " << N << ")";
    throw ValidationError(msg.str());
  }
}

// The three products every f^(n) is built from:
//   first  = F(x0 => 0)
//   second = F(x0 => L) F(L => 0)
//   cycle  = F(0 => L) F(L => 0)
// Free/Biased keep logarithms so nothing underflows; OU carries relative errors.
struct Base {
  bool log_form = true;
  cplx first, second, cycle;  // logs when log_form
  double rel_first = 0.0, rel_second = 0.0, rel_cycle = 0.0;
};

Base base_products(const ProcessSpec& p, double x0, double L, cplx s) {
  Base b;
  if (p.kind() != ProcessKind::OU) {
    const cplx lL0 = log_fpt_one_boundary_laplace(p, L, 0.0, s);
    b.first = log_fpt_one_boundary_laplace(p, x0, 0.0, s);
    b.second = log_fpt_one_boundary_laplace(p, x0, L, s) + lL0;
    b.cycle = log_fpt_one_boundary_laplace(p, 0.0, L, s) + lL0;
    return b;
  }
  b.log_form = false;
  const double a = p.center();
  auto kernel = [&](double A, double B) {
    const Side side = A <= B ? Side::Minus : Side::Plus;
    return u_pm_ratio(p, side, s, A - a, B - a);
  };
  const SpecfunResult x0_0 = kernel(x0, 0.0);
  const SpecfunResult x0_L = kernel(x0, L);
  const SpecfunResult zero_L = kernel(0.0, L);
  const SpecfunResult L_0 = kernel(L, 0.0);
  b.first = x0_0.value;
  b.rel_first = x0_0.relative_error();
  b.second = x0_L.value * L_0.value;
  b.rel_second = x0_L.relative_error() + L_0.relative_error();
  b.cycle = zero_L.value * L_0.value;
  b.rel_cycle = zero_L.relative_error() + L_0.relative_error();
  return b;
}

KernelValue term_from_base(const Base& b, int n) {
  const bool even = n % 2 == 0;
  const int k = even ? n / 2 : (n - 1) / 2;
  if (b.log_form) return {std::exp((even ? b.first : b.second) + double(k) * b.cycle), 0.0};
  const cplx v = (even ? b.first : b.second) * std::pow(b.cycle, k);
  const double rel = (even ? b.rel_first : b.rel_second) + k * b.rel_cycle;
  return {v, rel * std::abs(v)};
}

KernelValue ftwo_from_base(const Base& b, int N) {
  cplx num = 0.0;
  double num_err = 0.0;
  for (int n = 0; n < N; ++n) {
    const KernelValue f = term_from_base(b, n);
    num += (n % 2 == 0) ? f.value : -f.value;
    num_err += f.est_error;
  }
  const int half = N / 2;
  cplx den;
  double den_err = 0.0;
  if (b.log_form) {
    den = -expm1c(double(half) * b.cycle);
  } else {
    const cplx xp = std::pow(b.cycle, half);
    den = 1.0 - xp;
    den_err = half * b.rel_cycle * std::abs(xp);
  }
  if (!(std::abs(den) >= 1e-300)) {
    throw DomainError("two-boundary transform: denominator 1 - X^(N/2) vanishes");
  }
  const cplx r = num / den;
  return {r, (num_err + std::abs(r) * den_err) / std::abs(den)};
}

// Closed-form f^(n)(t) for Free/Biased: the free-space image at distance d,
// scaled by the bias factor e^{-x0 v / 2D} and damped by e^{-v^2 t / 4D}.
double image_term(const ProcessSpec& p, int n, double x0, double L, double t) {
  const double D = p.diffusion();
  const double v = p.drift();
  const double d = (n % 2 == 0) ? L * n + x0 : L * (n + 1) - x0;
  const double log_val = -x0 * v / (2.0 * D) + std::log(d) - 0.5 * std::log(4.0 * kPi * D * t * t * t) -
                         d * d / (4.0 * D * t) - v * v * t / (4.0 * D);
  return std::exp(log_val);
}

void require_times(const std::vector<double>& times) {
  require_valid(!times.empty(), "time grid is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require_domain(times[i] > 0.0 && std::isfinite(times[i]), "time grid values must be positive");
    if (i > 0) require_valid(times[i] > times[i - 1], "time grid must be strictly increasing");
  }
}

}  // namespace

std::string to_string(Target target) { return target == Target::Lower ? "lower" : "upper"; }

void DensityCurve::scan_negatives() {
  min_value = values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
  negative_count = static_cast<int>(
      std::count_if(values.begin(), values.end(), [](double v) { return v < kNegativeFloor; }));
}

cplx f_n_laplace(const ProcessSpec& p, int n, double x0, double L, cplx s) {
  require_domain(n >= 0, "filtration index must be non-negative");
  StaticBoundaries{L}.validate_start(x0);
  return term_from_base(base_products(p, x0, L, s), n).value;
}

KernelValue ftwo_laplace_value(const ProcessSpec& p, double x0, double L, cplx s, int N) {
  require_order(N);
  StaticBoundaries{L}.validate_start(x0);
  return ftwo_from_base(base_products(p, x0, L, s), N);
}

cplx ftwo_laplace(const ProcessSpec& p, double x0, double L, cplx s, int N) {
  return ftwo_laplace_value(p, x0, L, s, N).value;
}

LaplaceKernel ftwo_kernel(const ProcessSpec& p, double x0, double L, Target target, int N) {
  require_order(N);
  StaticBoundaries{L}.validate_start(x0);
  const Oriented o = orient(p, x0, L, target);
  return {[o, L, N](cplx s) { return ftwo_from_base(base_products(o.p, o.x0, L, s), N); }, 0.0};
}

FiltrationTerms filtration_terms(const ProcessSpec& p, double x0, double L, Target target,
                                 const std::vector<double>& times, int N, int talbot_nodes) {
  require_valid(N >= 1, "filtration order N must be >= 1");
  StaticBoundaries{L}.validate_start(x0);
  require_times(times);
  const Oriented o = orient(p, x0, L, target);

  FiltrationTerms out;
  out.times = times;
  out.terms.assign(N, std::vector<double>(times.size(), 0.0));
  out.errors.assign(N, std::vector<double>(times.size(), 0.0));

  if (p.kind() != ProcessKind::OU) {
    for (int n = 0; n < N; ++n) {
      for (std::size_t i = 0; i < times.size(); ++i) out.terms[n][i] = image_term(o.p, n, o.x0, L, times[i]);
    }
    return out;
  }

  // One contour per time; all N terms share its kernel evaluations.
  auto evaluate = [&](cplx s, std::span<KernelValue> buf) {
    const Base b = base_products(o.p, o.x0, L, s);
    for (int n = 0; n < N; ++n) buf[n] = term_from_base(b, n);
  };
  detail::parallel_for(times.size(), [&](std::size_t i) {
    const std::vector<InversionResult> r = invert_talbot_many(evaluate, N, times[i], talbot_nodes);
    for (int n = 0; n < N; ++n) {
      out.terms[n][i] = r[n].value;
      out.errors[n][i] = r[n].error_estimate + r[n].imag_residue;
    }
  });
  return out;
}

double ftwo_series_time(const ProcessSpec& p, double x0, double L, double t, int N) {
  require_domain(t > 0.0, "ftwo_series_time requires t > 0");
  const FiltrationTerms terms = filtration_terms(p, x0, L, Target::Lower, {t}, N);
  double acc = 0.0;
  for (int n = 0; n < N; ++n) acc += (n % 2 == 0 ? 1.0 : -1.0) * terms.terms[n][0];
  return acc;
}

int auto_order(const ProcessSpec& p, double x0, double L, double t_max) {
  for (int N = 1; N <= 10000; ++N) {
    if (characteristic_time(p, N - 1, x0, L) > t_max) return N;
  }
  throw ConvergenceError("no filtration order reaches the requested horizon");
}

RatioReport ratio_diagnostic(const FiltrationTerms& terms, int n) {
  require_valid(n >= 0 && n + 1 < static_cast<int>(terms.terms.size()),
                "ratio diagnostic needs terms n and n+1");
  RatioReport r;
  r.n = n;
  const auto& lo = terms.terms[n];
  const auto& hi = terms.terms[n + 1];
  for (std::size_t i = 0; i < lo.size(); ++i) {
    r.omitted_sup = std::max(r.omitted_sup, std::abs(hi[i]));
    if (std::abs(lo[i]) > 1e-300) r.max_ratio = std::max(r.max_ratio, std::abs(hi[i] / lo[i]));
  }
  return r;
}

DensityCurve ftwo_series_curve(const ProcessSpec& p, double x0, double L, Target target,
                               const std::vector<double>& times, const FiltrationOptions& opts) {
  StaticBoundaries{L}.validate_start(x0);
  require_times(times);
  const bool automatic = opts.N <= 0;
  int N = opts.N;
  FiltrationTerms terms;

  if (p.kind() == ProcessKind::OU) {
    const int rows = automatic ? opts.max_order + 1 : N + 1;
    terms = filtration_terms(p, x0, L, target, times, rows, opts.talbot_nodes);
    if (automatic) {
      double sup0 = 0.0;
      for (double v : terms.terms[0]) sup0 = std::max(sup0, std::abs(v));
      N = 0;
      for (int n = 1; n <= opts.max_order; ++n) {
        double sup = 0.0;
        for (double v : terms.terms[n]) sup = std::max(sup, std::abs(v));
        if (sup <= opts.auto_tol * sup0 && ratio_diagnostic(terms, n - 1).max_ratio < 1.0) {
          N = n;
          break;
        }
      }
      if (N == 0) {
        std::ostringstream msg;
        msg << "filtration series did not settle within " << opts.max_order << " terms";
        throw ConvergenceError(msg.str());
      }
    }
  } else {
    const double x0_eff = target == Target::Lower ? x0 : L - x0;
    if (automatic) {
      N = auto_order(p, x0_eff, L, times.back());
      if (N > opts.max_order) {
        std::ostringstream msg;
        msg << "horizon t = " << times.back() << " needs order " << N << " > max_order " << opts.max_order;
        throw ConvergenceError(msg.str());
      }
    }
    for (;;) {
      terms = filtration_terms(p, x0, L, target, times, N + 1);
      if (!automatic || ratio_diagnostic(terms, N - 1).max_ratio < 1.0) break;
      if (++N > opts.max_order) {
        std::ostringstream msg;
        msg << "ratio test stays >= 1 up to order " << opts.max_order;
        throw ConvergenceError(msg.str());
      }
    }
  }

  DensityCurve c;
  c.times = times;
  c.values.assign(times.size(), 0.0);
  c.errors.assign(times.size(), 0.0);
  for (int n = 0; n < N; ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      c.values[i] += sign * terms.terms[n][i];
      c.errors[i] += terms.errors[n][i];
    }
  }
  c.method = "series-" + std::to_string(N);
  c.trunc_order = N;
  const RatioReport ratio = ratio_diagnostic(terms, N - 1);
  if (ratio.max_ratio >= 1.0) {
    std::ostringstream msg;
    msg << "ratio test |f^(" << N << ")/f^(" << N - 1 << ")| reaches " << ratio.max_ratio
        << " on the grid; first omitted term up to " << ratio.omitted_sup;
    c.warnings.push_back(msg.str());
  }
  c.scan_negatives();
  return c;
}

DensityCurve ftwo_laplace_curve(const ProcessSpec& p, double x0, double L, Target target,
                                const std::vector<double>& times, int N, int talbot_nodes) {
  require_times(times);
  const LaplaceKernel kernel = ftwo_kernel(p, x0, L, target, N);
  DensityCurve c;
  c.times = times;
  c.values.assign(times.size(), 0.0);
  c.errors.assign(times.size(), 0.0);
  std::vector<std::string> notes(times.size());
  detail::parallel_for(times.size(), [&](std::size_t i) {
    const InversionResult r = invert_talbot(kernel, times[i], talbot_nodes);
    c.values[i] = r.value;
    c.errors[i] = r.error_estimate + r.imag_residue;
    if (r.warning) notes[i] = "t=" + std::to_string(times[i]) + ": " + r.note;
  });
  for (auto& n : notes) {
    if (!n.empty()) c.warnings.push_back(std::move(n));
  }
  c.method = "laplace-" + std::to_string(N);
  c.trunc_order = N;
  c.scan_negatives();
  return c;
}

MovingResult ftwo_moving(const ProcessSpec& p, double x0, const MovingBoundaries& mb, double t_end,
                         const MovingOptions& opts) {
  require_domain(p.kind() == ProcessKind::Free, "moving boundaries are supported for free diffusion");
  mb.validate_start(x0);
  require_domain(t_end > 0.0 && std::isfinite(t_end), "moving-boundary horizon must be positive");
  mb.validate_horizon(t_end);
  const double dt_req = opts.dt > 0.0 ? opts.dt : t_end / 4000.0;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / dt_req - 1e-9));
  const double dt = t_end / steps;
  const double D = p.diffusion();

  std::vector<double> t(steps + 1), lo_pos(steps + 1), up_pos(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    t[i] = dt * i;
    lo_pos[i] = mb.lower().at(t[i]);
    up_pos[i] = mb.upper().at(t[i]);
  }

  // Density of first reaching a boundary at t_i, starting from A at t_j.
  const double norm = 1.0 / std::sqrt(4.0 * kPi * D);
  auto kernel = [&](double start_gap, double reach, double elapsed) {
    return std::abs(start_gap) * norm / (elapsed * std::sqrt(elapsed)) *
           std::exp(-reach * reach / (4.0 * D * elapsed));
  };

  std::vector<double> g_lo(steps + 1, 0.0), g_up(steps + 1, 0.0);
  for (std::size_t i = 1; i <= steps; ++i) {
    g_lo[i] = kernel(x0 - lo_pos[0], lo_pos[i] - x0, t[i]);
    g_up[i] = kernel(up_pos[0] - x0, up_pos[i] - x0, t[i]);
  }

  MovingResult res;
  std::vector<double> sum_lo = g_lo, sum_up = g_up;
  auto sup = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  res.last_term_sup.push_back(std::max(sup(g_lo), sup(g_up)));

  const int fixed = opts.N;
  int levels = 1;
  bool settled = fixed <= 0 && res.last_term_sup.back() < opts.conv_tol;
  while (!settled && (fixed <= 0 ? levels <= opts.max_order : levels < fixed)) {
    std::vector<double> n_lo(steps + 1, 0.0), n_up(steps + 1, 0.0);
    // Trapezoid in tau; both endpoints contribute zero (g(0) = 0 and the
    // kernel vanishes as tau -> t because the boundaries never touch).
    detail::parallel_for(steps + 1, [&](std::size_t i) {
      double acc_lo = 0.0, acc_up = 0.0;
      for (std::size_t j = 1; j < i; ++j) {
        const double elapsed = t[i] - t[j];
        const double gap = up_pos[j] - lo_pos[j];
        if (g_up[j] != 0.0) acc_lo += g_up[j] * kernel(gap, lo_pos[i] - up_pos[j], elapsed);
        if (g_lo[j] != 0.0) acc_up += g_lo[j] * kernel(gap, up_pos[i] - lo_pos[j], elapsed);
      }
      n_lo[i] = dt * acc_lo;
      n_up[i] = dt * acc_up;
    });
    const double sign = levels % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i <= steps; ++i) {
      sum_lo[i] += sign * n_lo[i];
      sum_up[i] += sign * n_up[i];
    }
    g_lo.swap(n_lo);
    g_up.swap(n_up);
    res.last_term_sup.push_back(std::max(sup(g_lo), sup(g_up)));
    ++levels;
    if (fixed <= 0 && res.last_term_sup.back() < opts.conv_tol) settled = true;
  }
  if (fixed <= 0 && !settled) {
    std::ostringstream msg;
    msg << "moving-boundary filtration did not settle below " << opts.conv_tol << " within "
        << opts.max_order << " levels (last term sup " << res.last_term_sup.back() << ")";
    throw ConvergenceError(msg.str());
  }

  auto finish = [&](DensityCurve& c, std::vector<double>& values) {
    c.times = t;
    c.values = std::move(values);
    c.errors.assign(t.size(), 0.0);
    c.method = "moving-" + std::to_string(levels);
    c.trunc_order = levels;
    c.scan_negatives();
  };
  finish(res.lower, sum_lo);
  finish(res.upper, sum_up);
  return res;
}

double splitting_probability(const ProcessSpec& p, double x0, double L, Target target) {
  StaticBoundaries{L}.validate_start(x0);
  const Oriented o = orient(p, x0, L, target);
  // Richardson on F(s) = P + c s + O(s^2) removes the linear term.
  const double s0 = 1e-6 * p.diffusion() / (L * L);
  const double full = ftwo_laplace(o.p, o.x0, L, s0, 2).real();
  const double half = ftwo_laplace(o.p, o.x0, L, s0 / 2.0, 2).real();
  return 2.0 * half - full;
}

double cumulative_absorption(const ProcessSpec& p, double x0, double L, Target target, double t,
                             int talbot_nodes) {
  const LaplaceKernel k = ftwo_kernel(p, x0, L, target, 2);
  const LaplaceKernel integrated{[k](cplx s) {
                                   const KernelValue v = k.evaluator(s);
                                   return KernelValue{v.value / s, v.est_error / std::abs(s)};
                                 },
                                 0.0};
  return invert_talbot(integrated, t, talbot_nodes).value;
}

}  // namespace fpt
