#include "fpt/eigen.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fpt/errors.hpp"

namespace fpt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOmittedTol = 1e-12;

void require_interval(double t, double x0, double L, int M) {
  require_domain(t > 0.0, "eigen expansion requires t > 0");
  StaticBoundaries{L}.validate_start(x0);
  require_valid(M >= 1, "eigen expansion needs at least one mode");
}

// Shared by ee_free / ee_biased: sum over sine modes with an extra decay floor.
EigenValue sine_modes(double t, double x0, double L, double D, double floor_rate, double prefactor,
                      int M) {
  const double k = kPi / L;
  double acc = 0.0;
  for (int m = 1; m <= M; ++m) {
    acc += m * std::sin(m * k * x0) * std::exp(-(D * (m * k) * (m * k) + floor_rate) * t);
  }
  const double scale = prefactor * 2.0 * D * kPi / (L * L);
  EigenValue r;
  r.value = scale * acc;
  r.modes = M;
  const int m = M + 1;
  const double first = std::abs(scale) * m * std::exp(-(D * (m * k) * (m * k) + floor_rate) * t);
  const double q = (double(m + 1) / m) * std::exp(-D * (2.0 * m + 1.0) * k * k * t);
  r.omitted_bound = q < 1.0 ? first / (1.0 - q) : std::numeric_limits<double>::infinity();
  r.warning = r.omitted_bound > kOmittedTol;
  return r;
}

struct Coordinates {
  double b, xi0, xiL;
};

Coordinates coordinates(const ProcessSpec& p, double L) {
  require_domain(p.kind() == ProcessKind::OU, "OU spectrum requires an Ornstein-Uhlenbeck process");
  StaticBoundaries{L}.validate();
  const double b = std::sqrt(p.ou_length_sq());
  return {b, -p.center() / b, (L - p.center()) / b};
}

// Solution vanishing at xi0 with unit slope, evaluated at xiL (same zeros as the determinant).
double shoot(double s, const Coordinates& c) {
  const WeberPath<double> path(s + 0.5, c.xi0, 0.0, 1.0, c.xiL);
  double y, dy, ls;
  path.evaluate(c.xiL, y, dy, ls);
  // Sign is all the scan needs; magnitude stays finite through log_scale.
  return y == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(y)) + std::min(ls, 600.0)), y);
}

struct EvenOdd {
  double e, o;
};

EvenOdd even_odd(double s, double xi) {
  if (xi == 0.0) return {1.0, 0.0};
  const WeberPath<double> pe(s + 0.5, 0.0, 1.0, 0.0, xi);
  const WeberPath<double> po(s + 0.5, 0.0, 0.0, 1.0, xi);
  return {pe.value(xi), po.value(xi)};
}

}  // namespace

EigenValue ee_free(double t, double x0, double L, double D, int M) {
  require_interval(t, x0, L, M);
  require_domain(D > 0.0, "D must be positive");
  return sine_modes(t, x0, L, D, 0.0, 1.0, M);
}

EigenValue ee_biased(double t, double x0, double L, double D, double v, int M) {
  require_interval(t, x0, L, M);
  require_domain(D > 0.0, "D must be positive");
  return sine_modes(t, x0, L, D, v * v / (4.0 * D), std::exp(-x0 * v / (2.0 * D)), M);
}

double ou_determinant(const ProcessSpec& p, double L, double s) {
  const Coordinates c = coordinates(p, L);
  const EvenOdd lo = even_odd(s, c.xi0);
  const EvenOdd hi = even_odd(s, c.xiL);
  return lo.e * hi.o - hi.e * lo.o;
}

double OuSpectrum::xi(double x) const {
  return (x - process.center()) / std::sqrt(process.ou_length_sq());
}

double OuSpectrum::eigenfunction(std::size_t i, double x) const {
  const SpectrumEntry& m = modes.at(i);
  return m.shape->value(xi(x)) / std::sqrt(m.norm);
}

double OuSpectrum::eigenfunction_derivative(std::size_t i, double x) const {
  const SpectrumEntry& m = modes.at(i);
  const double b = std::sqrt(process.ou_length_sq());
  return m.shape->derivative(xi(x)) / (b * std::sqrt(m.norm));
}

OuSpectrum ou_spectrum(const ProcessSpec& p, double L, int M, const SpectrumOptions& opts) {
  require_valid(M >= 1, "spectrum needs at least one mode");
  const Coordinates c = coordinates(p, L);
  const double width = c.xiL - c.xi0;
  const double unit = (kPi / width) * (kPi / width);  // free-box eigenvalue scale in xi

  OuSpectrum out{p, L, {}};
  double s_lo = 0.0;
  double f_lo = shoot(s_lo, c);
  int halvings = 0;
  while (static_cast<int>(out.modes.size()) < M) {
    const int n = static_cast<int>(out.modes.size()) + 1;
    // 5% of the local free-box gap (2n + 1) unit, refined after a missed root.
    const double step = 0.05 * (2.0 * n + 1.0) * unit / std::pow(2.0, halvings);
    const double s_hi = s_lo + step;
    const double f_hi = shoot(s_hi, c);
    if ((f_lo > 0.0) == (f_hi > 0.0) && f_hi != 0.0) {
      s_lo = s_hi;
      f_lo = f_hi;
      continue;
    }
    double a = s_lo, fa = f_lo, bnd = s_hi;
    while (bnd - a > opts.root_tol * std::max(1.0, std::abs(a))) {
      const double mid = 0.5 * (a + bnd);
      if (mid <= a || mid >= bnd) break;  // interval at floating-point resolution
      const double fm = shoot(mid, c);
      if (fm == 0.0) {
        a = bnd = mid;
        break;
      }
      if ((fm > 0.0) == (fa > 0.0)) {
        a = mid;
        fa = fm;
      } else {
        bnd = mid;
      }
    }
    const double root = 0.5 * (a + bnd);

    auto path = std::make_shared<const WeberPath<double>>(root + 0.5, c.xi0, 0.0, 1.0, c.xiL);
    const int nodes = path->sign_changes();
    if (nodes != n - 1) {
      if (nodes > n - 1 && halvings < opts.max_refinements) {
        // Skipped past a root: rescan from the last confirmed root with a finer step.
        ++halvings;
        s_lo = out.modes.empty() ? 0.0 : out.modes.back().s + 1e-9 * std::max(1.0, out.modes.back().s);
        f_lo = shoot(s_lo, c);
        continue;
      }
      std::ostringstream msg;
      msg << "OU spectrum: root " << n << " at s=" << root << " has " << nodes
          << " interior nodes; the scan step needs refinement";
      throw NumericError(msg.str());
    }
    halvings = 0;

    SpectrumEntry e;
    e.n = n;
    e.s = root;
    e.nodes = nodes;
    double norm_xi = 0.0;
    for (const auto& seg : path->segments()) {
      const double z0 = seg.z0, z1 = seg.z0 + seg.h;
      auto sq = [&](double z) {
        const double v = path->value(z);
        return v * v;
      };
      const double part = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          sq, std::min(z0, z1), std::max(z0, z1), 0, 0.0);
      norm_xi += part;
    }
    e.norm = c.b * norm_xi;
    const EvenOdd lo = even_odd(root, c.xi0);
    const EvenOdd hi = even_odd(root, c.xiL);
    const double det = lo.e * hi.o - hi.e * lo.o;
    e.residual = std::abs(det) / (std::abs(lo.e * hi.o) + std::abs(hi.e * lo.o));
    const double scale_o = std::max(std::abs(hi.o), std::abs(lo.o));
    if (scale_o < 1e-14 * std::max(std::abs(hi.e), std::abs(lo.e))) {
      e.A = std::numeric_limits<double>::infinity();
    } else if (std::abs(hi.o) >= std::abs(lo.o)) {
      e.A = -hi.e / hi.o;
    } else {
      e.A = -lo.e / lo.o;
    }
    e.shape = std::move(path);
    out.modes.push_back(std::move(e));

    s_lo = root + 1e-9 * std::max(1.0, root);
    f_lo = shoot(s_lo, c);
  }
  return out;
}

EigenValue ee_ou_fpt(double t, const OuSpectrum& spec, double x0, Target target) {
  require_domain(t > 0.0, "eigen expansion requires t > 0");
  StaticBoundaries{spec.L}.validate_start(x0);
  const ProcessSpec& p = spec.process;
  const double D = p.diffusion();
  const double tau = p.relaxation_time();
  const double b2 = p.ou_length_sq();
  const double a = p.center();
  const double wall = target == Target::Lower ? 0.0 : spec.L;
  const double y0 = x0 - a;
  const double yw = wall - a;
  const double sign = target == Target::Lower ? 1.0 : -1.0;
  const double pref = sign * D * std::exp(-(yw * yw - y0 * y0) / (4.0 * b2));

  EigenValue r;
  double acc = 0.0;
  double last = 0.0;
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    const double term = spec.eigenfunction(i, x0) * spec.eigenfunction_derivative(i, wall) *
                        std::exp(-spec.modes[i].s * t / tau);
    acc += term;
    last = term;
  }
  r.value = pref * acc;
  r.modes = static_cast<int>(spec.modes.size());
  r.omitted_bound = std::abs(pref * last);
  r.warning = r.omitted_bound > 1e-10;
  return r;
}

DensityCurve ee_curve(const ProcessSpec& p, double x0, double L, Target target,
                      const std::vector<double>& times, int M) {
  require_valid(!times.empty(), "time grid is empty");
  StaticBoundaries{L}.validate_start(x0);
  DensityCurve c;
  c.times = times;
  c.values.resize(times.size());
  c.errors.resize(times.size());
  c.method = "eigen";
  c.trunc_order = M;
  double worst = 0.0;

  if (p.kind() == ProcessKind::OU) {
    const OuSpectrum spec = ou_spectrum(p, L, M);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const EigenValue v = ee_ou_fpt(times[i], spec, x0, target);
      c.values[i] = v.value;
      c.errors[i] = v.omitted_bound;
      worst = std::max(worst, v.omitted_bound);
    }
  } else {
    const ProcessSpec q = target == Target::Lower ? p : p.mirrored(L);
    const double x = target == Target::Lower ? x0 : L - x0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const EigenValue v = ee_biased(times[i], x, L, q.diffusion(), q.drift(), M);
      c.values[i] = v.value;
      c.errors[i] = v.omitted_bound;
      worst = std::max(worst, v.omitted_bound);
    }
  }
  if (worst > kOmittedTol) {
    std::ostringstream msg;
    msg << "mode count " << M << " leaves an omitted-term bound of " << worst << " on the grid";
    c.warnings.push_back(msg.str());
  }
  c.scan_negatives();
  return c;
}

double ee_tail_mass(const ProcessSpec& p, double x0, double L, Target target, double t, int M) {
  require_domain(t >= 0.0, "tail mass requires t >= 0");
  StaticBoundaries{L}.validate_start(x0);
  if (p.kind() == ProcessKind::OU) {
    const OuSpectrum spec = ou_spectrum(p, L, M);
    const double D = p.diffusion();
    const double tau = p.relaxation_time();
    const double b2 = p.ou_length_sq();
    const double wall = target == Target::Lower ? 0.0 : L;
    const double y0 = x0 - p.center();
    const double yw = wall - p.center();
    const double pref = (target == Target::Lower ? 1.0 : -1.0) * D *
                        std::exp(-(yw * yw - y0 * y0) / (4.0 * b2));
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.modes.size(); ++i) {
      const double rate = spec.modes[i].s / tau;
      acc += spec.eigenfunction(i, x0) * spec.eigenfunction_derivative(i, wall) *
             std::exp(-rate * t) / rate;
    }
    return pref * acc;
  }
  const ProcessSpec q = target == Target::Lower ? p : p.mirrored(L);
  const double x = target == Target::Lower ? x0 : L - x0;
  const double D = q.diffusion();
  const double v = q.drift();
  const double k = kPi / L;
  double acc = 0.0;
  for (int m = 1; m <= M; ++m) {
    const double rate = D * (m * k) * (m * k) + v * v / (4.0 * D);
    acc += m * std::sin(m * k * x) * std::exp(-rate * t) / rate;
  }
  return std::exp(-x * v / (2.0 * D)) * 2.0 * D * kPi / (L * L) * acc;
}

}  // namespace fpt
