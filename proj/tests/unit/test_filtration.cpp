#include <doctest.h>

#include <cmath>
#include <random>

#include "fpt/errors.hpp"
#include "fpt/filtration.hpp"

using namespace fpt;

namespace {

const ProcessSpec kFree = ProcessSpec::free(1.0);
const ProcessSpec kBiased = ProcessSpec::biased_from_slope(1.0, -0.3, 1.0);
const ProcessSpec kOu = ProcessSpec::ornstein_uhlenbeck(1.0, 1.0, 1.0, 1.0);

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(lo + (hi - lo) * i / (n - 1));
  return t;
}

}  // namespace

TEST_CASE("image terms have the closed-form transform") {
  const double x0 = 5.0, L = 8.0;
  const cplx s(0.3, 0.7);
  for (int n = 0; n < 6; ++n) {
    const double d = n % 2 == 0 ? n * L + x0 : (n + 1) * L - x0;
    CHECK(std::abs(f_n_laplace(kFree, n, x0, L, s) - std::exp(-d * std::sqrt(s))) < 1e-14);
  }
}

TEST_CASE("closed form is independent of the step count N") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> re(0.01, 5.0), im(-20.0, 20.0);
  for (const ProcessSpec& p : {kFree, kBiased, kOu}) {
    const double x0 = p.kind() == ProcessKind::OU ? 1.5 : 5.0, L = p.kind() == ProcessKind::OU ? 3.0 : 8.0;
    for (int i = 0; i < 20; ++i) {
      const cplx s(re(g), im(g));
      const cplx f2 = ftwo_laplace(p, x0, L, s, 2);
      for (int N : {4, 6, 8}) CHECK(std::abs(ftwo_laplace(p, x0, L, s, N) - f2) <= 1e-12 * std::abs(f2));
    }
  }
  CHECK_THROWS_AS(ftwo_laplace(kFree, 5.0, 8.0, 1.0, 3), ValidationError);
}

TEST_CASE("free transform equals the sinh ratio") {
  const double x0 = 5.0, L = 8.0;
  for (cplx s : {cplx(0.2), cplx(1.0, 4.0)}) {
    const cplx q = std::sqrt(s);
    CHECK(std::abs(ftwo_laplace(kFree, x0, L, s) - std::sinh((L - x0) * q) / std::sinh(L * q)) < 1e-13);
  }
}

TEST_CASE("splitting probabilities") {
  CHECK(std::abs(splitting_probability(kFree, 5.0, 8.0) - 0.375) < 1e-10);
  CHECK(std::abs(splitting_probability(kFree, 5.0, 8.0, Target::Upper) - 0.625) < 1e-10);
  // (exp(-vL/D) - exp(-v x0/D)) / (exp(-vL/D) - 1), v = -0.3
  CHECK(std::abs(splitting_probability(kBiased, 6.0, 10.0) - 0.735420204066779143) < 1e-9);
  // int_{x0}^{L} e^{(y-a)^2/2} dy / int_0^L e^{(y-a)^2/2} dy
  const double ou_lower = splitting_probability(kOu, 1.5, 3.0);
  CHECK(std::abs(ou_lower - 0.710223655677879570) < 1e-8);
  CHECK(std::abs(ou_lower + splitting_probability(kOu, 1.5, 3.0, Target::Upper) - 1.0) < 1e-8);
}

TEST_CASE("series: N = 1 is the one-boundary kernel and terms alternate") {
  const double x0 = 5.0, L = 8.0;
  for (double t : {1.0, 10.0}) {
    CHECK(ftwo_series_time(kFree, x0, L, t, 1) == doctest::Approx(fpt_one_boundary_time(kFree, x0, 0.0, t)));
  }
  const FiltrationTerms ft = filtration_terms(kFree, x0, L, Target::Lower, grid(0.5, 100.0, 50), 5);
  for (const auto& row : ft.terms)
    for (double v : row) CHECK(v >= 0.0);
}

TEST_CASE("series and Laplace routes agree") {
  const auto t = grid(0.5, 60.0, 40);
  for (const ProcessSpec& p : {kFree, kBiased}) {
    const double x0 = 5.0, L = 8.0;
    FiltrationOptions o;
    o.N = 12;
    const DensityCurve a = ftwo_series_curve(p, x0, L, Target::Lower, t, o);
    const DensityCurve b = ftwo_laplace_curve(p, x0, L, Target::Lower, t, 2);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-10);
    CHECK(a.method == "series-12");
  }
}

TEST_CASE("upper target is the mirrored lower problem") {
  const auto t = grid(0.5, 40.0, 20);
  const DensityCurve up = ftwo_laplace_curve(kBiased, 6.0, 10.0, Target::Upper, t);
  const DensityCurve lo = ftwo_laplace_curve(kBiased.mirrored(10.0), 4.0, 10.0, Target::Lower, t);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(up.values[i] == doctest::Approx(lo.values[i]).epsilon(1e-12));
}

TEST_CASE("auto order and ratio diagnostic") {
  const auto t = grid(0.5, 200.0, 100);
  const DensityCurve c = ftwo_series_curve(kFree, 5.0, 8.0, Target::Lower, t);
  CHECK(c.trunc_order >= auto_order(kFree, 5.0, 8.0, 200.0));
  const FiltrationTerms ft = filtration_terms(kFree, 5.0, 8.0, Target::Lower, t, 4);
  const RatioReport r = ratio_diagnostic(ft, 2);
  CHECK(r.n == 2);
  CHECK(r.max_ratio > 0.0);
  // Explicit short truncation: warning, no throw.
  FiltrationOptions o;
  o.N = 1;
  const DensityCurve short_c = ftwo_series_curve(kFree, 5.0, 8.0, Target::Lower, t, o);
  CHECK_FALSE(short_c.warnings.empty());
}

TEST_CASE("negative values are counted, not clamped") {
  DensityCurve c;
  c.values = {1.0, -1e-8, -1e-10, 0.5};
  c.scan_negatives();
  CHECK(c.negative_count == 1);
  CHECK(c.min_value == -1e-8);
}

TEST_CASE("cumulative absorption tends to the splitting probability") {
  CHECK(std::abs(cumulative_absorption(kFree, 5.0, 8.0, Target::Lower, 2000.0) - 0.375) < 1e-8);
  const double half = cumulative_absorption(kFree, 5.0, 8.0, Target::Lower, 10.0);
  CHECK(half > 0.0);
  CHECK(half < 0.375);
}

TEST_CASE("moving recursion reproduces the static series when the boundaries stand still") {
  MovingOptions o;
  o.dt = 0.002;
  const MovingResult r = ftwo_moving(kFree, 2.0, MovingBoundaries{3.0, 0.0, 0.0}, 4.0, o);
  for (std::size_t i = 100; i < r.lower.times.size(); i += 200) {
    const double t = r.lower.times[i];
    CHECK(std::abs(r.lower.values[i] - ftwo_series_time(kFree, 2.0, 3.0, t, 12)) < 2e-4);
  }
  CHECK(r.last_term_sup.back() < o.conv_tol);
  CHECK_THROWS_AS(ftwo_moving(kOu, 1.5, MovingBoundaries{3.0, 0.0, 0.0}, 1.0), DomainError);
}

TEST_CASE("moving recursion conserves mass up to the collapse time") {
  MovingOptions o;
  o.dt = 0.002;
  const MovingBoundaries mb{3.0, 0.2, -0.1};
  const MovingResult r = ftwo_moving(kFree, 2.0, mb, 9.0, o);
  double mass = 0.0;
  for (const DensityCurve* c : {&r.lower, &r.upper}) {
    for (std::size_t i = 1; i < c->times.size(); ++i)
      mass += 0.5 * (c->values[i] + c->values[i - 1]) * (c->times[i] - c->times[i - 1]);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}
