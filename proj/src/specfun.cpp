#include "fpt/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fpt/errors.hpp"
#include "fpt/process.hpp"
#include "fpt/weber.hpp"

namespace fpt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

// Godfrey's Lanczos coefficients, g = 607/128.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,
    .15808870322491248884e-3,   -.21026444172410488319e-3,
    .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,
    .36899182659531622704e-5};

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx log_gamma_right(cplx z) {
  z -= 1.0;
  cplx x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + double(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// log(sin(pi z)), stable for large |Im z|.
cplx log_sin_pi(cplx z) {
  const cplx i(0.0, 1.0);
  if (std::abs(z.imag()) < 20.0) return std::log(std::sin(kPi * z));
  if (z.imag() > 0.0) {
    return -i * kPi * z + std::log(0.5 * i) + std::log(1.0 - std::exp(2.0 * i * kPi * z));
  }
  return i * kPi * z - std::log(2.0 * i) + std::log(1.0 - std::exp(-2.0 * i * kPi * z));
}

SpecfunResult kummer_series(cplx a, cplx b, cplx z, int max_terms) {
  cplx term = 1.0;
  cplx sum = 1.0;
  double abs_sum = 1.0;
  int k = 0;
  int small_run = 0;
  for (; k < max_terms; ++k) {
    const cplx ak = a + double(k);
    if (ak == 0.0) {  // terminating series
      return {sum, 4.0 * kEps * abs_sum, k + 1};
    }
    term *= ak / (b + double(k)) * z / double(k + 1);
    sum += term;
    const double at = std::abs(term);
    abs_sum += at;
    // Tail is geometric once the term ratio drops below 1/2.
    const double ratio = std::abs((a + double(k + 1)) / (b + double(k + 1)) * z) / double(k + 2);
    if (ratio < 0.5 && at <= kEps * std::abs(sum)) {
      if (++small_run >= 2) {
        const double tail = 2.0 * at * ratio;
        return {sum, 4.0 * kEps * abs_sum + tail, k + 2};
      }
    } else {
      small_run = 0;
    }
  }
  std::ostringstream msg;
  msg << "1F1 series did not converge in " << max_terms << " terms (a=" << a << ", b=" << b
      << ", z=" << z << ")";
  throw ConvergenceError(msg.str());
}

}  // namespace

double SpecfunResult::relative_error() const {
  const double v = std::abs(value);
  if (v == 0.0) return est_error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return est_error / v;
}

cplx log_gamma(cplx z) {
  if (is_nonpositive_integer(z)) {
    std::ostringstream msg;
    msg << "log_gamma: pole at z=" << z.real();
    throw DomainError(msg.str());
  }
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(kPi) - log_sin_pi(z) - log_gamma_right(1.0 - z);
  }
  return log_gamma_right(z);
}

cplx rgamma(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  return std::exp(-log_gamma(z));
}

SpecfunResult kummer_1f1(cplx a, cplx b, cplx z, const SeriesOptions& opts) {
  if (is_nonpositive_integer(b)) {
    std::ostringstream msg;
    msg << "1F1: b=" << b.real() << " is a non-positive integer";
    throw DomainError(msg.str());
  }
  if (z == 0.0) return {1.0, 0.0, 1};

  SpecfunResult direct = kummer_series(a, b, z, opts.max_terms);
  if (direct.relative_error() <= opts.max_rel_error) return direct;

  if (z.real() < 0.0) {
    SpecfunResult t = kummer_series(b - a, b, -z, opts.max_terms);
    const cplx ez = std::exp(z);
    SpecfunResult transformed{ez * t.value, std::abs(ez) * t.est_error + kEps * std::abs(ez * t.value),
                              t.terms_used};
    if (transformed.relative_error() < direct.relative_error()) direct = transformed;
    if (direct.relative_error() <= opts.max_rel_error) return direct;
  }

  std::ostringstream msg;
  msg << "1F1 lost precision (relative error " << direct.relative_error() << ") at a=" << a
      << ", b=" << b << ", z=" << z;
  throw NumericError(msg.str());
}

namespace {

// u(z) = exp(log_scale) * mantissa with
//   mantissa = M(-nu/2, 1/2, z^2/2) - rho z M((1-nu)/2, 3/2, z^2/2).
// The pieces are chosen so that the mantissa stays O(1) for the orders the
// Talbot contour produces; ratios at a fixed order only need the mantissa.
struct WeberPieces {
  cplx log_scale;
  cplx rho;
  bool odd_only = false;  // (1-nu)/2 at a pole of Gamma: the even piece drops out
};

WeberPieces weber_pieces(cplx nu) {
  const cplx half_even = (1.0 - nu) / 2.0;
  const cplx half_odd = -nu / 2.0;
  const cplx common = 0.5 * nu * std::log(2.0) + 0.5 * std::log(kPi);
  if (is_nonpositive_integer(half_even)) {
    return {common - log_gamma(half_odd) + 0.5 * std::log(2.0), 0.0, true};
  }
  WeberPieces w{common - log_gamma(half_even), 0.0, false};
  if (!is_nonpositive_integer(half_odd)) {
    w.rho = std::sqrt(2.0) * std::exp(log_gamma(half_even) - log_gamma(half_odd));
  }
  return w;
}

SpecfunResult weber_mantissa(const WeberPieces& w, cplx nu, double z, const SeriesOptions& opts) {
  const double arg = 0.5 * z * z;
  if (w.odd_only) {
    const SpecfunResult m2 = kummer_1f1((1.0 - nu) / 2.0, 1.5, arg, opts);
    return {-z * m2.value, std::abs(z) * m2.est_error, m2.terms_used};
  }
  const SpecfunResult m1 = kummer_1f1(-nu / 2.0, 0.5, arg, opts);
  if (w.rho == 0.0 || z == 0.0) return m1;
  const SpecfunResult m2 = kummer_1f1((1.0 - nu) / 2.0, 1.5, arg, opts);
  const cplx odd = w.rho * z * m2.value;
  const cplx v = m1.value - odd;
  const double err = m1.est_error + std::abs(w.rho * z) * m2.est_error +
                     2.0 * kEps * (std::abs(m1.value) + std::abs(odd));
  return {v, err, m1.terms_used + m2.terms_used};
}

void require_weber_argument(double z, cplx nu) {
  if (!std::isfinite(z) || std::abs(z) > 10.0) {
    std::ostringstream msg;
    msg << "parabolic cylinder argument z=" << z << " outside |z| <= 10 (nu=" << nu << ")";
    throw DomainError(msg.str());
  }
}

// Internal consumers never fail on precision; they carry the estimate onward.
SeriesOptions kernel_series_options() {
  SeriesOptions o;
  o.max_rel_error = std::numeric_limits<double>::infinity();
  return o;
}

// Above this relative error the 1F1 pair is cancelling and the inward
// Weber-equation route is tried as well.
constexpr double kSwitchRelError = 1e-10;

struct ScaledValue {
  cplx mantissa;
  double log_scale = 0.0;  // value = exp(log_scale) * mantissa
  double rel_error = std::numeric_limits<double>::infinity();
};

// e^{z^2/4} D_nu(z) at each z, by whichever route is more accurate. With
// `ratio_only` the values share an unspecified common factor.
std::vector<ScaledValue> scaled_weber(cplx nu, const std::vector<double>& zs, bool ratio_only) {
  std::vector<ScaledValue> out(zs.size());
  bool need_ode = false;
  const SeriesOptions opts = kernel_series_options();
  try {
    const WeberPieces w = weber_pieces(nu);
    for (std::size_t i = 0; i < zs.size(); ++i) {
      try {
        const SpecfunResult m = weber_mantissa(w, nu, zs[i], opts);
        const cplx ls = w.log_scale;
        out[i] = {m.value * std::exp(cplx(0.0, ls.imag())), ls.real(), m.relative_error()};
      } catch (const ConvergenceError&) {
      }
      if (!(out[i].rel_error <= kSwitchRelError)) need_ode = true;
    }
  } catch (const NumericError&) {
    need_ode = true;
  }
  if (!need_ode) return out;
  std::vector<RecessiveWeberValue> ode;
  try {
    ode = ratio_only ? weber_recessive(nu + 0.5, zs) : parabolic_cylinder_inward(nu, zs);
  } catch (const NumericError&) {
    return out;
  }
  // One route for all points, so ratios share a consistent normalization.
  double worst_series = 0.0, worst_ode = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    worst_series = std::max(worst_series, out[i].rel_error);
    worst_ode = std::max(worst_ode, ode[i].rel_error);
  }
  if (worst_ode < worst_series) {
    for (std::size_t i = 0; i < zs.size(); ++i) {
      out[i] = {ode[i].mantissa, ode[i].log_scale + 0.25 * zs[i] * zs[i], ode[i].rel_error};
    }
  }
  return out;
}

double weber_coordinate(const ProcessSpec& p, Side side, double y0) {
  const double z = y0 / std::sqrt(p.ou_length_sq());
  return side == Side::Plus ? z : -z;
}

}  // namespace

SpecfunResult parabolic_cylinder_d(cplx nu, double z, const SeriesOptions& opts) {
  require_weber_argument(z, nu);
  const ScaledValue v = scaled_weber(nu, {z}, false).front();
  if (!(v.rel_error <= opts.max_rel_error)) {
    std::ostringstream msg;
    msg << "parabolic cylinder D lost precision (relative error " << v.rel_error << ") at nu=" << nu
        << ", z=" << z;
    throw NumericError(msg.str());
  }
  const cplx value = v.mantissa * std::exp(v.log_scale - 0.25 * z * z);
  return {value, v.rel_error * std::abs(value), 0};
}

SpecfunResult u_pm(const ProcessSpec& p, Side side, cplx s, double y0) {
  require_domain(p.kind() == ProcessKind::OU, "u_pm requires an Ornstein-Uhlenbeck process");
  const cplx nu = -p.relaxation_time() * s;
  const double z = weber_coordinate(p, side, y0);
  require_weber_argument(z, nu);
  const ScaledValue v = scaled_weber(nu, {z}, false).front();
  const cplx value = v.mantissa * std::exp(v.log_scale);
  return {value, v.rel_error * std::abs(value), 0};
}

SpecfunResult u_pm_ratio(const ProcessSpec& p, Side side, cplx s, double y_num, double y_den) {
  require_domain(p.kind() == ProcessKind::OU, "u_pm_ratio requires an Ornstein-Uhlenbeck process");
  const cplx nu = -p.relaxation_time() * s;
  const double zn = weber_coordinate(p, side, y_num);
  const double zd = weber_coordinate(p, side, y_den);
  require_weber_argument(zn, nu);
  require_weber_argument(zd, nu);
  const std::vector<ScaledValue> v = scaled_weber(nu, {zn, zd}, true);
  if (v[1].mantissa == 0.0) {
    std::ostringstream msg;
    msg << "u_pm_ratio: denominator vanishes at nu=" << nu << ", z=" << zd;
    throw NumericError(msg.str());
  }
  const cplx r = v[0].mantissa / v[1].mantissa * std::exp(v[0].log_scale - v[1].log_scale);
  const double rel = v[0].rel_error + v[1].rel_error + 2.0 * kEps;
  return {r, rel * std::abs(r), 0};
}

}  // namespace fpt
