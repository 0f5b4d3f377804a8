#include "fpt/weber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpt/errors.hpp"

namespace fpt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxTerms = 120;

double magnitude(double v) { return std::abs(v); }
double magnitude(const cplx& v) { return std::abs(v); }

double real_part(double v) { return v; }
double real_part(const cplx& v) { return v.real(); }

template <typename T>
double step_length(T c, double z) {
  const double q = magnitude(0.25 * z * z - c);
  return std::min(0.5, 1.5 / std::sqrt(q + 1.0));
}

// Taylor coefficients of y about z0 from y'' = (z^2/4 - c) y, up to the point
// where terms at |h| are negligible.
template <typename T>
std::vector<T> expand(T c, double z0, T y, T dy, double h) {
  const T q0 = 0.25 * z0 * z0 - c;
  const double ah = std::abs(h);
  const double ref = magnitude(y) + magnitude(dy) * ah;
  std::vector<T> a{y, dy};
  a.reserve(48);
  double hp = ah;  // |h|^k for the last coefficient
  int quiet = 0;
  for (int k = 0; static_cast<int>(a.size()) < kMaxTerms; ++k) {
    T next = q0 * a[k];
    if (k >= 1) next += 0.5 * z0 * a[k - 1];
    if (k >= 2) next += 0.25 * a[k - 2];
    next /= double((k + 2) * (k + 1));
    a.push_back(next);
    hp *= ah;
    if (k >= 4 && magnitude(next) * hp * ah <= 1e-18 * ref) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  return a;
}

template <typename T>
void horner(const std::vector<T>& a, double dz, T& y, T& dy) {
  y = T{};
  dy = T{};
  for (std::size_t k = a.size(); k-- > 0;) {
    y = y * dz + a[k];
    if (k >= 1) dy = dy * dz + double(k) * a[k];
  }
}

}  // namespace

template <typename T>
WeberPath<T>::WeberPath(T c, double z0, T y0, T dy0, double z_end, double log_scale)
    : c_(c), z_start_(z0), z_end_(z_end) {
  require_domain(std::isfinite(z0) && std::isfinite(z_end), "Weber path endpoints must be finite");
  const double dir = z_end >= z0 ? 1.0 : -1.0;
  double z = z0;
  T y = y0;
  T dy = dy0;
  double scale = log_scale;
  while (dir * (z_end - z) > 0.0) {
    double h = dir * step_length(c, z);
    if (dir * (z + h - z_end) > 0.0 || std::abs(z_end - (z + h)) < 1e-12) h = z_end - z;
    Segment seg{z, h, scale, expand(c, z, y, dy, h)};
    horner(seg.coeffs, h, y, dy);
    z += h;
    if (std::abs(z - z_end) < 1e-14 * std::max(1.0, std::abs(z_end))) z = z_end;
    segments_.push_back(std::move(seg));
    const double norm = magnitude(y) + magnitude(dy) / std::sqrt(magnitude(0.25 * z * z - c) + 1.0);
    if (norm > 0.0 && std::isfinite(norm) && (norm > 1e8 || norm < 1e-8)) {
      y /= norm;
      dy /= norm;
      scale += std::log(norm);
    }
    if (!std::isfinite(magnitude(y)) || !std::isfinite(magnitude(dy))) {
      throw NumericError("Weber path overflowed");
    }
  }
}

template <typename T>
const typename WeberPath<T>::Segment& WeberPath<T>::locate(double z) const {
  if (segments_.empty()) throw DomainError("Weber path has zero length");
  const double dir = z_end_ >= z_start_ ? 1.0 : -1.0;
  const double lo = std::min(z_start_, z_end_);
  const double hi = std::max(z_start_, z_end_);
  if (z < lo - 1e-12 || z > hi + 1e-12) throw DomainError("point outside the Weber path");
  // Segments are ordered along the direction of integration.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), z,
                             [dir](double v, const Segment& s) { return dir * (v - s.z0) < 0.0; });
  if (it == segments_.begin()) return segments_.front();
  return *(it - 1);
}

template <typename T>
void WeberPath<T>::evaluate(double z, T& y, T& dy, double& log_scale) const {
  const Segment& s = locate(z);
  horner(s.coeffs, z - s.z0, y, dy);
  log_scale = s.log_scale;
}

template <typename T>
T WeberPath<T>::value(double z) const {
  T y, dy;
  double ls;
  evaluate(z, y, dy, ls);
  return y * std::exp(ls);
}

template <typename T>
T WeberPath<T>::derivative(double z) const {
  T y, dy;
  double ls;
  evaluate(z, y, dy, ls);
  return dy * std::exp(ls);
}

template <typename T>
int WeberPath<T>::sign_changes() const {
  constexpr int kSamples = 12;
  int changes = 0;
  double last = 0.0;
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const Segment& s = segments_[k];
    // The endpoint itself is skipped: a zero there is a boundary zero.
    const int samples = k + 1 == segments_.size() ? kSamples - 1 : kSamples;
    for (int i = 1; i <= samples; ++i) {
      T y, dy;
      horner(s.coeffs, s.h * i / kSamples, y, dy);
      const double v = real_part(y);
      if (v == 0.0) continue;
      if (last != 0.0 && (v > 0.0) != (last > 0.0)) ++changes;
      last = v;
    }
  }
  return changes;
}

template class WeberPath<double>;
template class WeberPath<cplx>;

namespace {

// Reads the requested points off an inward path. Rounding committed where |y|
// was largest is carried to every later point, so the relative error at z
// scales with the peak magnitude seen before z.
std::vector<RecessiveWeberValue> sample_inward(const WeberPath<cplx>& path,
                                               const std::vector<double>& zs, double base_err) {
  const double step_err = 8.0 * kEps * (path.steps() + 1);
  const auto& segs = path.segments();
  std::vector<double> peak(segs.size());
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double m = std::abs(segs[i].coeffs[0]);
    if (m > 0.0) running = std::max(running, std::log(m) + segs[i].log_scale);
    peak[i] = running;
  }
  std::vector<RecessiveWeberValue> out;
  out.reserve(zs.size());
  for (double z : zs) {
    cplx y, dy;
    double ls;
    path.evaluate(z, y, dy, ls);
    double rel = base_err + step_err;
    if (std::abs(y) == 0.0) {
      rel = std::numeric_limits<double>::infinity();
    } else if (!peak.empty()) {
      std::size_t idx = 0;
      while (idx + 1 < peak.size() && segs[idx + 1].z0 >= z) ++idx;
      const double growth = peak[idx] - (std::log(std::abs(y)) + ls);
      if (growth > 0.0) rel = base_err + step_err * std::exp(std::min(growth, 700.0));
    }
    out.push_back({y, ls, rel});
  }
  return out;
}

}  // namespace

std::vector<RecessiveWeberValue> parabolic_cylinder_inward(cplx nu, const std::vector<double>& zs) {
  require_domain(!zs.empty(), "parabolic_cylinder_inward needs at least one point");
  const double z_max = *std::max_element(zs.begin(), zs.end());
  const double z_min = *std::min_element(zs.begin(), zs.end());
  const double z_far = std::max({z_max + 2.0, 10.0, std::sqrt(8.0 * std::abs(nu) + 80.0)});

  // D_nu(z) ~ z^nu e^{-z^2/4} sum_s (-1)^s (-nu)_{2s} / (s! (2 z^2)^s)
  const double zf = z_far;
  cplx term = 1.0;
  cplx series = 1.0;
  cplx dseries = 0.0;  // d/dz of the series
  double smallest = 1.0;
  double asym_err = 0.0;
  for (int s = 0; s < 200; ++s) {
    const cplx next =
        -term * (-nu + 2.0 * s) * (-nu + 2.0 * s + 1.0) / (double(s + 1) * 2.0 * zf * zf);
    const double an = std::abs(next);
    if (an > smallest) {  // asymptotic series started to diverge
      asym_err = smallest / std::max(std::abs(series), 1e-300);
      break;
    }
    smallest = an;
    term = next;
    series += term;
    dseries += term * (-2.0 * (s + 1) / zf);
    if (an < 1e-18 * std::abs(series)) {
      asym_err = an / std::abs(series);
      break;
    }
  }

  const cplx log_lead = nu * std::log(zf) - 0.25 * zf * zf;
  const cplx phase = std::exp(cplx(0.0, log_lead.imag()));
  const cplx y0 = phase * series;
  const cplx dy0 = phase * (series * (nu / zf - 0.5 * zf) + dseries);

  const WeberPath<cplx> path(nu + 0.5, zf, y0, dy0, std::min(z_min, zf), log_lead.real());
  return sample_inward(path, zs, asym_err);
}

std::vector<RecessiveWeberValue> weber_recessive(cplx c, const std::vector<double>& zs) {
  require_domain(!zs.empty(), "weber_recessive needs at least one point");
  const double z_max = *std::max_element(zs.begin(), zs.end());
  const double z_min = *std::min_element(zs.begin(), zs.end());
  auto root = [c](double z) { return std::sqrt(0.25 * z * z - c); };

  // Walk outward until the two solutions have separated by ~e^45; anything
  // but the recessive one in the starting data is then invisible inside.
  constexpr double kSeparation = 45.0;
  constexpr double kDz = 0.05;
  double z = z_max + 1.0;
  double accum = 0.0;
  while (accum < kSeparation || (0.25 * z * z - c).real() <= 0.0) {
    accum += root(z + 0.5 * kDz).real() * kDz;
    z += kDz;
    if (z > 1e4) throw NumericError("weber_recessive: no decaying region within z < 1e4");
  }
  const cplx q = 0.25 * z * z - c;
  const cplx sq = std::sqrt(q);
  const cplx dy0 = -sq - 0.5 * z / (4.0 * q);
  const WeberPath<cplx> path(c, z, 1.0, dy0, z_min, 0.0);
  return sample_inward(path, zs, 0.0);
}

}  // namespace fpt
