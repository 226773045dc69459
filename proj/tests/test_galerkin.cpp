#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "linresp/determinant.hpp"
#include "linresp/galerkin.hpp"
#include "linresp/response.hpp"
#include "linresp/traces.hpp"

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

TEST_CASE("doubling map operator has the exact subsampling pattern") {
  // entries[m'][m] = int e^{2 pi i (m - 2 m') y} dy = [m == 2 m'] on the
  // doubling map with u = 0; uniform quadrature resolves this exactly.
  GalerkinOperator op = assemble_transfer(doubling_with(TrigPoly{}),
                                          trig_cos(1), 0.0, 0.0, 16, 512);
  for (int mp = -16; mp <= 16; ++mp)
    for (int m = -16; m <= 16; ++m) {
      double want = (m == 2 * mp) ? 1.0 : 0.0;
      CHECK(std::abs(entry(op, mp, m) - want) < 1e-13);
    }
}

TEST_CASE("leading eigenvalue is 1 and the density integrates observables") {
  CircleMapFamily fam = nonlinear();
  GalerkinOperator op = assemble_transfer(fam, trig_cos(1), 0.0, 0.0, 48, 1024);
  LeadingPair lp = invariant_density(op);
  CHECK(lp.eigenvalue == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(lp.rho(48) - std::complex<double>(1.0, 0.0)) < 1e-13);

  // doubling: invariant density is Lebesgue, all nonzero modes vanish
  GalerkinOperator op2 = assemble_transfer(doubling_with(TrigPoly{}),
                                           trig_cos(1), 0.0, 0.0, 16, 512);
  LeadingPair lp2 = invariant_density(op2);
  CHECK(std::abs(mean_of(trig_cos(1), lp2.rho, 16)) < 1e-12);
  CHECK(mean_of(trig_cos(1) + trig_const(0.3), lp2.rho, 16) ==
        doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("conjugate-frequency symmetry of the real-weight operator") {
  CircleMapFamily fam = nonlinear();
  GalerkinOperator op = assemble_transfer(fam, trig_cos(1), 0.3, 0.01, 12, 512);
  for (int mp = -12; mp <= 12; ++mp)
    for (int m = -12; m <= 12; ++m)
      CHECK(std::abs(entry(op, -mp, -m) - std::conj(entry(op, mp, m))) < 1e-13);
}

TEST_CASE("matrix traces reproduce the periodic-point traces") {
  CircleMapFamily fam = nonlinear();
  TraceSet tr = compute_traces(fam, trig_cos(1), 4);
  GalerkinOperator op = assemble_transfer(fam, trig_cos(1), 0.0, 0.0, 48, 1024);
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(op.E.rows(), op.E.cols());
  for (int n = 1; n <= 4; ++n) {
    P = P * op.E;
    std::complex<double> t = P.trace();
    CHECK(std::abs(t.imag()) < 1e-10);
    CHECK(t.real() == doctest::Approx(tr.b[n]).epsilon(1e-8));
  }
}

TEST_CASE("determinant values match the spectral product") {
  CircleMapFamily fam = nonlinear();
  TraceSet tr = compute_traces(fam, trig_cos(1), 12);
  DetSeries<double> s = coefficients(tr);
  GalerkinOperator op = assemble_transfer(fam, trig_cos(1), 0.0, 0.0, 48, 1024);
  auto eig = spectrum(op);
  using C = std::complex<double>;
  for (double r : {0.4, 0.9, 1.3}) {
    for (int k = 0; k < 8; ++k) {
      C z = r * C(std::cos(2 * kPi * k / 8.0), std::sin(2 * kPi * k / 8.0));
      C prod(1.0, 0.0);
      for (C lam : eig) prod *= (C(1.0, 0.0) - z * lam);
      CHECK(std::abs(eval_d(s, z).d - prod) < 1e-6);
    }
  }
}

TEST_CASE("refinement stability in both discretization parameters") {
  CircleMapFamily fam = nonlinear();
  TrigPoly g = trig_cos(1);
  double m64 = mean_at_t(fam, g, 0.0, 64, 4096);
  double m80 = mean_at_t(fam, g, 0.0, 80, 4096);
  double m64k = mean_at_t(fam, g, 0.0, 64, 8192);
  CHECK(std::abs(m64 - m80) < 1e-10);
  CHECK(std::abs(m64 - m64k) < 1e-12);

  double r64 = susceptibility_response(fam, g, 64, 4096);
  double r80 = susceptibility_response(fam, g, 80, 4096);
  CHECK(std::abs(r64 - r80) < 1e-9);
}

TEST_CASE("susceptibility series on the pinned doubling families") {
  TrigPoly g = trig_cos(1);
  double r_stated = susceptibility_response(doubling_with(trig_sin(1)), g, 64);
  CHECK(std::abs(r_stated) < 1e-8);
  double r_corr = susceptibility_response(doubling_with(trig_sin(2)), g, 64);
  CHECK(r_corr == doctest::Approx(-kPi).epsilon(1e-8));
  double r_frozen = susceptibility_response(doubling_with(TrigPoly{}), g, 64);
  CHECK(std::abs(r_frozen) < 1e-13);
}

TEST_CASE("finite-difference response oracle on the pinned families") {
  TrigPoly g = trig_cos(1);
  double r_corr =
      finite_difference_response(doubling_with(trig_sin(2)), g, 64, 4096, 1e-3);
  CHECK(r_corr == doctest::Approx(-kPi).epsilon(1e-6));
  double r_stated =
      finite_difference_response(doubling_with(trig_sin(1)), g, 64, 4096, 1e-3);
  CHECK(std::abs(r_stated) < 1e-6);
}

TEST_CASE("all three response routes agree on a generic family") {
  CircleMapFamily fam = nonlinear();
  TrigPoly g = trig_cos(1);
  TraceSet tr = compute_traces(fam, g, 12);
  DetSeries<double> s = coefficients(tr);
  double r_det = linear_response(s, WeightSign::minus_ug);
  double r_sus = susceptibility_response(fam, g, 64, 4096);
  double r_fd = finite_difference_response(fam, g, 64, 4096, 1e-3);
  CHECK(r_det == doctest::Approx(r_sus).epsilon(1e-7).scale(1.0));
  CHECK(r_det == doctest::Approx(r_fd).epsilon(1e-5).scale(1.0));
}

TEST_CASE("guards: aliasing quadrature, oversized step, undersized basis") {
  CircleMapFamily fam = nonlinear();
  CHECK_THROWS_WITH_AS(assemble_transfer(fam, trig_cos(1), 0.0, 0.0, 64, 256),
                       "quadrature underresolved: need K >= 8M",
                       std::runtime_error);
  CHECK_THROWS_AS(
      finite_difference_response(fam, trig_cos(1), 32, 1024, fam.t_max),
      std::invalid_argument);
  GalerkinOperator op = assemble_transfer(fam, trig_cos(1), 0.0, 0.0, 4, 64);
  LeadingPair lp = invariant_density(op);
  CHECK_THROWS_AS(mean_of(trig_cos(8), lp.rho, 4), std::invalid_argument);
}
