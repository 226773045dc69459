#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "linresp/determinant.hpp"

using namespace linresp;

namespace {
constexpr double kPi = 3.14159265358979323846;

CircleMapFamily doubling_with(TrigPoly X) {
  CircleMapFamily fam;
  fam.degree = 2;
  fam.X = std::move(X);
  fam.t_max = 0.05;
  return fam;
}

CircleMapFamily nonlinear() {
  CircleMapFamily fam;
  fam.degree = 2;
  fam.p0 = trig_sin(1, 0.05);
  fam.X = trig_sin(1);
  fam.t_max = 0.05;
  return fam;
}
}  // namespace

TEST_CASE("doubling map determinant is exactly 1 - z") {
  TraceSet tr = compute_traces(doubling_with(TrigPoly{}), trig_cos(1), 12);
  DetSeries<double> s = coefficients(tr);
  CHECK(s.a[0] == 1.0);
  CHECK(s.a[1] == doctest::Approx(-1.0).epsilon(1e-13));
  for (int n = 2; n <= 12; ++n) CHECK(std::abs(s.a[n]) < 1e-12);
  CHECK(smallest_zero(s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("doubling map weight derivative of the coefficients") {
  // da_du = (0, 1, -1, 0, ...) from b = 1, db_du = (-1, 0, ...).
  TraceSet tr = compute_traces(doubling_with(TrigPoly{}), trig_cos(1), 10);
  DetSeries<double> s = coefficients(tr);
  CHECK(s.da_du[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.da_du[2] == doctest::Approx(-1.0).epsilon(1e-12));
  for (int n = 3; n <= 10; ++n) CHECK(std::abs(s.da_du[n]) < 1e-10);
}

TEST_CASE("pinned t-derivative coefficients, X = sin(2 pi x)") {
  TraceSet tr = compute_traces(doubling_with(trig_sin(1)), trig_cos(1), 10);
  DetSeries<double> s = coefficients(tr);
  CHECK(s.da_dt[1] == doctest::Approx(2 * kPi).epsilon(1e-12));
  CHECK(s.da_dt[2] == doctest::Approx(-2 * kPi).epsilon(1e-12));
  for (int n = 3; n <= 10; ++n) CHECK(std::abs(s.da_dt[n]) < 1e-10);
  // mixed series terminates: (-2 pi, 3 pi, -pi, 0, ...)
  CHECK(s.d2a_dudt[1] == doctest::Approx(-2 * kPi).epsilon(1e-12));
  CHECK(s.d2a_dudt[2] == doctest::Approx(3 * kPi).epsilon(1e-12));
  CHECK(s.d2a_dudt[3] == doctest::Approx(-kPi).epsilon(1e-11));
  for (int n = 4; n <= 10; ++n) CHECK(std::abs(s.d2a_dudt[n]) < 1e-10);
}

TEST_CASE("pinned t-derivative coefficients, X = sin(4 pi x)") {
  TraceSet tr = compute_traces(doubling_with(trig_sin(2)), trig_cos(1), 10);
  DetSeries<double> s = coefficients(tr);
  CHECK(s.da_dt[1] == doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(s.da_dt[2] == doctest::Approx(-4 * kPi).epsilon(1e-12));
  for (int n = 3; n <= 10; ++n) CHECK(std::abs(s.da_dt[n]) < 1e-10);
  CHECK(s.d2a_dudt[1] == doctest::Approx(-4 * kPi).epsilon(1e-12));
  CHECK(s.d2a_dudt[2] == doctest::Approx(5 * kPi).epsilon(1e-12));
  CHECK(s.d2a_dudt[3] == doctest::Approx(-2 * kPi).epsilon(1e-11));
  for (int n = 4; n <= 10; ++n) CHECK(std::abs(s.d2a_dudt[n]) < 1e-10);
}

TEST_CASE("determinant equals exp of minus the trace tail inside the disk") {
  CircleMapFamily fam = nonlinear();
  const int N = 14;
  TraceSet tr = compute_traces(fam, trig_cos(1), N);
  DetSeries<double> s = coefficients(tr);
  using C = std::complex<double>;
  auto exp_side = [&](C z) {
    C acc(0.0, 0.0), zp(1.0, 0.0);
    for (int n = 1; n <= N; ++n) {
      zp *= z;
      acc += zp * (tr.b[n] / n);
    }
    return std::exp(-acc);
  };
  for (int k = 0; k < 12; ++k) {
    double th = 2 * kPi * k / 12.0;
    C z02 = 0.2 * C(std::cos(th), std::sin(th));
    CHECK(std::abs(eval_d(s, z02).d - exp_side(z02)) < 1e-10);
    C z05 = 0.5 * C(std::cos(th), std::sin(th));
    CHECK(std::abs(eval_d(s, z05).d - exp_side(z05)) < 1e-3);
  }
}

TEST_CASE("evaluation and derivative structure of eval_d") {
  TraceSet tr = compute_traces(nonlinear(), trig_cos(1), 10);
  DetSeries<double> s = coefficients(tr);
  // real and complex evaluation agree on the real axis
  DetValue<double> vr = eval_d(s, 0.73);
  DetValue<std::complex<double>> vc = eval_d(s, std::complex<double>(0.73, 0.0));
  CHECK(vc.d.real() == doctest::Approx(vr.d).epsilon(1e-15));
  CHECK(std::abs(vc.d.imag()) < 1e-16);
  CHECK(vc.dz.real() == doctest::Approx(vr.dz).epsilon(1e-15));
  // dz is the z-derivative of d
  const double h = 1e-6;
  double fd = (eval_d(s, 0.73 + h).d - eval_d(s, 0.73 - h).d) / (2 * h);
  CHECK(vr.dz == doctest::Approx(fd).epsilon(1e-8));
  double fdt = (eval_d(s, 0.73 + h).dt - eval_d(s, 0.73 - h).dt) / (2 * h);
  CHECK(vr.dzt == doctest::Approx(fdt).epsilon(1e-7).scale(1.0));
}

TEST_CASE("leading zero is at 1 for the unweighted transfer operator") {
  TraceSet tr = compute_traces(nonlinear(), trig_cos(1), 12);
  DetSeries<double> s = coefficients(tr);
  CHECK(smallest_zero(s) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("implicit zero motion in u matches the derivative ratio") {
  CircleMapFamily fam = nonlinear();
  const int N = 12;
  const double h = 1e-5;
  TraceSet tr0 = compute_traces(fam, trig_cos(1), N);
  DetSeries<double> s0 = coefficients(tr0);
  double z0 = smallest_zero(s0);
  DetValue<double> v = eval_d(s0, z0);
  double slope_ift = -v.du / v.dz;

  auto zero_at_u = [&](double u) {
    TraceSet tw = tr0;
    for (int n = 1; n <= N; ++n) {
      FixedPointSet fps = enumerate_fixed_points(fam, trig_cos(1), n, 0.0);
      tw.b[n] = trace_b_weighted(fps, u);
    }
    return smallest_zero(coefficients(tw));
  };
  double slope_fd = (zero_at_u(h) - zero_at_u(-h)) / (2 * h);
  CHECK(slope_ift == doctest::Approx(slope_fd).epsilon(1e-7).scale(1.0));
}

TEST_CASE("decay fits on synthetic coefficient sequences") {
  std::vector<double> a_circle{1.0};
  for (int n = 1; n <= 10; ++n) a_circle.push_back(std::exp(-0.3 * n * n));
  DecayFit fc = decay_fit_values(a_circle, DecayMode::circle);
  CHECK(fc.theta == doctest::Approx(std::exp(-0.3)).epsilon(1e-10));
  CHECK(fc.r2 > 0.999999);
  CHECK(fc.npts >= 4);

  std::vector<double> a_torus{1.0};
  for (int n = 1; n <= 10; ++n) a_torus.push_back(std::exp(-0.4 * std::pow(n, 1.5)));
  DecayFit ft = decay_fit_values(a_torus, DecayMode::torus);
  CHECK(ft.beta == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(ft.theta < 1.0);
  CHECK(ft.r2 > 0.999999);
}

TEST_CASE("decay fit needs data above the precision floor") {
  // 1 - z leaves a single usable coefficient: diagnostics must refuse.
  TraceSet tr = compute_traces(doubling_with(TrigPoly{}), trig_cos(1), 12);
  DetSeries<double> s = coefficients(tr);
  CHECK_THROWS_AS(decay_fit(s, DecayMode::circle), std::runtime_error);
}

TEST_CASE("zero finder refuses a determinant without a simple zero") {
  DetSeries<double> s;
  s.n_max = 4;
  s.a = {1.0, 0.0, 0.0, 0.0, 0.0};
  s.da_du.assign(5, 0.0);
  s.da_dt.assign(5, 0.0);
  s.d2a_dudt.assign(5, 0.0);
  CHECK_THROWS_WITH_AS(smallest_zero(s), "zero not localized / not simple",
                       std::runtime_error);
}

TEST_CASE("wider scalar reproduces binary64 coefficients") {
  TraceSet tr = compute_traces(nonlinear(), trig_cos(1), 12);
  DetSeries<double> sd = coefficients(tr);
  DetSeries<long double> sl = coefficients<long double>(tr);
  for (int n = 0; n <= 12; ++n) {
    CHECK(static_cast<double>(sl.a[n]) ==
          doctest::Approx(sd.a[n]).epsilon(1e-13).scale(1.0));
    CHECK(static_cast<double>(sl.d2a_dudt[n]) ==
          doctest::Approx(sd.d2a_dudt[n]).epsilon(1e-12).scale(1.0));
  }
  CHECK(static_cast<double>(smallest_zero(sl)) ==
        doctest::Approx(smallest_zero(sd)).epsilon(1e-12));
}
