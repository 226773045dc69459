#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "linresp/response.hpp"

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

DetSeries<double> series(const CircleMapFamily& fam, const TrigPoly& g, int N) {
  return coefficients(compute_traces(fam, g, N));
}
}  // namespace

TEST_CASE("mean of an observable with a constant shift") {
  // Lebesgue is the physical measure of the doubling map, so the mean of
  // cos(2 pi x) + c is exactly c.
  CircleMapFamily fam = doubling_with(TrigPoly{});
  DetSeries<double> s = series(fam, trig_cos(1) + trig_const(0.25), 12);
  CHECK(mean_observable(s, WeightSign::minus_ug) ==
        doctest::Approx(0.25).epsilon(1e-12));
  DetSeries<double> s0 = series(fam, trig_cos(1), 12);
  CHECK(std::abs(mean_observable(s0, WeightSign::minus_ug)) < 1e-12);
}

TEST_CASE("frozen family has zero response") {
  CircleMapFamily fam = doubling_with(TrigPoly{});
  DetSeries<double> s = series(fam, trig_cos(1), 12);
  CHECK(std::abs(linear_response(s, WeightSign::minus_ug)) < 1e-13);
  CHECK(std::abs(linear_response_alt(s, WeightSign::minus_ug)) < 1e-13);
}

TEST_CASE("response is linear and shift-invariant in the observable") {
  CircleMapFamily fam = nonlinear();
  DetSeries<double> s1 = series(fam, trig_cos(1), 12);
  DetSeries<double> s2 = series(fam, 2.0 * trig_cos(1), 12);
  DetSeries<double> s3 = series(fam, trig_cos(1) + trig_const(5.0), 12);
  double r1 = linear_response(s1, WeightSign::minus_ug);
  CHECK(linear_response(s2, WeightSign::minus_ug) ==
        doctest::Approx(2 * r1).epsilon(1e-10));
  CHECK(linear_response(s3, WeightSign::minus_ug) ==
        doctest::Approx(r1).epsilon(1e-9).scale(1.0));
}

TEST_CASE("both response assemblies agree away from pinned cases") {
  CircleMapFamily fam = nonlinear();
  DetSeries<double> s = series(fam, trig_cos(1) + trig_sin(1, 0.3), 12);
  double r = linear_response(s, WeightSign::minus_ug);
  double ra = linear_response_alt(s, WeightSign::minus_ug);
  CHECK(r == doctest::Approx(ra).epsilon(1e-10).scale(1.0));
}

TEST_CASE("pinned response, X = sin(2 pi x): exact cancellation to zero") {
  // The mixed coefficient series terminates as (-2 pi, 3 pi, -pi, 0, ...),
  // summing to zero, and the cross term vanishes with the mean.
  DetSeries<double> s = series(doubling_with(trig_sin(1)), trig_cos(1), 10);
  CHECK(std::abs(mean_observable(s, WeightSign::minus_ug)) < 1e-13);
  CHECK(std::abs(linear_response(s, WeightSign::minus_ug)) < 1e-12);
  CHECK(std::abs(linear_response_alt(s, WeightSign::minus_ug)) < 1e-12);
}

TEST_CASE("pinned response, X = sin(4 pi x): exactly minus pi") {
  // Mixed coefficients terminate as (-4 pi, 5 pi, -2 pi, 0, ...): sum -pi.
  DetSeries<double> s = series(doubling_with(trig_sin(2)), trig_cos(1), 10);
  CHECK(linear_response(s, WeightSign::minus_ug) ==
        doctest::Approx(-kPi).epsilon(1e-12));
  CHECK(linear_response_alt(s, WeightSign::minus_ug) ==
        doctest::Approx(-kPi).epsilon(1e-12));
  // truncation is already converged at n_max = 4
  DetSeries<double> s4 = series(doubling_with(trig_sin(2)), trig_cos(1), 4);
  CHECK(linear_response(s4, WeightSign::minus_ug) ==
        doctest::Approx(-kPi).epsilon(1e-12));
}

TEST_CASE("torus weight sign flips the assembly") {
  // With the plus_vg convention on the same arrays, mean and response flip
  // against their minus_ug values built from identical inputs.
  DetSeries<double> s = series(doubling_with(trig_sin(2)), trig_cos(1), 10);
  double rm = linear_response(s, WeightSign::minus_ug);
  double rp = linear_response(s, WeightSign::plus_vg);
  CHECK(rm == doctest::Approx(-rp).epsilon(1e-12));
  DetSeries<double> sm = series(doubling_with(TrigPoly{}),
                                trig_cos(1) + trig_const(0.25), 12);
  CHECK(mean_observable(sm, WeightSign::minus_ug) ==
        doctest::Approx(-mean_observable(sm, WeightSign::plus_vg))
            .epsilon(1e-12));
}

TEST_CASE("Cesaro tail estimates of the mixed traces") {
  TraceSet tr1 = compute_traces(doubling_with(trig_sin(1)), trig_cos(1), 10);
  AbelDiagnostic a1 = abel_diagnostic(tr1, WeightSign::minus_ug, 0.0);
  CHECK(std::abs(a1.estimate) < 1e-11);       // d2b_n -> 0
  CHECK(a1.indicator < 1e-10);

  TraceSet tr2 = compute_traces(doubling_with(trig_sin(2)), trig_cos(1), 10);
  AbelDiagnostic a2 = abel_diagnostic(tr2, WeightSign::minus_ug, 0.0);
  CHECK(a2.estimate == doctest::Approx(kPi).epsilon(1e-11));  // d2b_n = n pi
  CHECK(a2.indicator < 1e-10);
  // -A agrees with the determinant response
  DetSeries<double> s = coefficients(tr2);
  CHECK(-a2.estimate ==
        doctest::Approx(linear_response(s, WeightSign::minus_ug)).epsilon(1e-10));
}

TEST_CASE("Cesaro diagnostic refuses an uncentered observable") {
  TraceSet tr = compute_traces(doubling_with(trig_sin(2)),
                               trig_cos(1) + trig_const(0.3), 10);
  CHECK_THROWS_WITH_AS(abel_diagnostic(tr, WeightSign::minus_ug, 0.3),
                       "observable not centered", std::runtime_error);
}

TEST_CASE("assembled report fields") {
  CircleMapFamily fam = doubling_with(trig_sin(2));
  TraceSet tr = compute_traces(fam, trig_cos(1), 10);
  DetSeries<double> s = coefficients(tr);
  ResponseReport rep = assemble_report(s, tr, WeightSign::minus_ug);
  CHECK(rep.mean == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  CHECK(rep.response == doctest::Approx(-kPi).epsilon(1e-12));
  CHECK(rep.response_alt == doctest::Approx(rep.response).epsilon(1e-12));
  CHECK(rep.truncation_n == 10);
  CHECK(rep.has_abel);
  CHECK(rep.abel_estimate == doctest::Approx(kPi).epsilon(1e-11));
  CHECK(rep.tail_indicator >= 0.0);

  // shifted observable: mean moves, Abel slot is dropped
  TraceSet trs = compute_traces(fam, trig_cos(1) + trig_const(0.4), 10);
  DetSeries<double> ss = coefficients(trs);
  ResponseReport reps = assemble_report(ss, trs, WeightSign::minus_ug);
  CHECK(reps.mean == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(!reps.has_abel);
}
