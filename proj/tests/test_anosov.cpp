#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "linresp/anosov.hpp"
#include "linresp/determinant.hpp"
#include "linresp/response.hpp"

using namespace linresp;

namespace {
constexpr double kPi = 3.14159265358979323846;

TorusMapFamily cat(double amp = 1.0) {
  TorusMapFamily fam;
  fam.A = Mat2l{2, 1, 1, 1};
  if (amp != 0.0) fam.P1.terms.push_back({1, 0, 0.0, amp});  // sin(2 pi x1)
  fam.t_max = 0.02;
  return fam;
}

TrigPoly2 cos_x1() {
  TrigPoly2 g;
  g.terms.push_back({1, 0, 1.0, 0.0});
  return g;
}

double frac(double x) { return x - std::floor(x); }

double torus_dist(const Vec2d& p, const Vec2d& q) {
  double d = 0.0;
  for (int i = 0; i < 2; ++i) {
    double e = std::abs(frac(p[i]) - frac(q[i]));
    d = std::max(d, std::min(e, 1.0 - e));
  }
  return d;
}

Vec2d apply_map(const TorusMapFamily& fam, const Vec2d& x, double t) {
  double y1 = fam.A.a * x[0] + fam.A.b * x[1] + t * fam.P1.eval(x[0], x[1]);
  double y2 = fam.A.c * x[0] + fam.A.d * x[1] + t * fam.P2.eval(x[0], x[1]);
  return {frac(y1), frac(y2)};
}
}  // namespace

TEST_CASE("integer matrix arithmetic and the hyperbolicity certificate") {
  Mat2l A{2, 1, 1, 1};
  CHECK(A.det() == 1);
  CHECK(A.trace() == 3);
  Mat2l A2 = mat_mul(A, A);
  CHECK(A2.a == 5);
  CHECK(A2.b == 3);
  CHECK(A2.c == 3);
  CHECK(A2.d == 2);
  Mat2l A6 = mat_pow(A, 6);
  CHECK(A6.trace() == 322);
  Vec2l v = mat_apply(A, {1, -2});
  CHECK(v[0] == 0);
  CHECK(v[1] == -1);
  CHECK_THROWS_AS(mat_pow(A, 64), std::overflow_error);

  certify_hyperbolicity(cat());
  TorusMapFamily bad = cat();
  bad.A = Mat2l{1, 1, 0, 1};  // parabolic
  CHECK_THROWS_AS(certify_hyperbolicity(bad), std::domain_error);
  TorusMapFamily bad2 = cat();
  bad2.A = Mat2l{2, 0, 0, 1};  // |det| = 2
  CHECK_THROWS_AS(certify_hyperbolicity(bad2), std::domain_error);
}

TEST_CASE("lattice enumeration: counts and exact periodicity") {
  TorusMapFamily fam = cat();
  TrigPoly2 g = cos_x1();
  for (int n = 1; n <= 8; ++n) {
    TorusFixedSet set = lattice_fixed_points(fam, g, n);
    std::int64_t want = mat_pow(fam.A, n).trace() - 2;
    CHECK(static_cast<std::int64_t>(set.points.size()) == want);
    for (const TorusOrbit& p : set.points) {
      // A^n c - c must be the recorded integer offset
      Mat2l An = mat_pow(fam.A, n);
      double r1 = An.a * p.c[0] + An.b * p.c[1] - p.c[0] - p.L[0];
      double r2 = An.c * p.c[0] + An.d * p.c[1] - p.c[1] - p.L[1];
      CHECK(std::abs(r1) < 1e-12);
      CHECK(std::abs(r2) < 1e-12);
      CHECK(p.c[0] >= 0.0);
      CHECK(p.c[0] < 1.0);
      CHECK(p.c[1] >= 0.0);
      CHECK(p.c[1] < 1.0);
    }
  }
}

TEST_CASE("five period-2 lattice points of the cat map") {
  TorusFixedSet set = lattice_fixed_points(cat(), cos_x1(), 2);
  REQUIRE(set.points.size() == 5);
  // (A^2 - I) x in Z^2  <=>  x in (1/5) {(0,0),(1,3),(2,1),(3,4),(4,2)}
  for (const TorusOrbit& p : set.points) {
    double s1 = 5.0 * p.c[0], s2 = 5.0 * p.c[1];
    CHECK(std::abs(s1 - std::round(s1)) < 1e-12);
    CHECK(std::abs(s2 - std::round(s2)) < 1e-12);
  }
}

TEST_CASE("unperturbed traces: unit b and the character-sum v-derivative") {
  TorusMapFamily fam = cat();
  TrigPoly2 g = cos_x1();
  for (int n = 1; n <= 6; ++n) {
    TorusFixedSet set = lattice_fixed_points(fam, g, n);
    CHECK(trace_b_torus(set) == doctest::Approx(1.0).epsilon(1e-12));
    double want_dv = (n == 1) ? 1.0 : 0.0;  // only n = 1 has a resonant mode
    CHECK(trace_db_dv_torus(set) ==
          doctest::Approx(want_dv).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("unperturbed determinant is 1 - z; mean matches Lebesgue") {
  TorusMapFamily fam = cat();
  fam.P1 = TrigPoly2{};  // freeze
  TrigPoly2 g = cos_x1();
  g.c0 = 0.25;
  TraceSet tr = anosov_traces(fam, g, 8, 0.01);
  DetSeries<double> s = coefficients(tr);
  CHECK(s.a[1] == doctest::Approx(-1.0).epsilon(1e-12));
  for (int n = 2; n <= 8; ++n) CHECK(std::abs(s.a[n]) < 1e-12);
  CHECK(mean_observable(s, WeightSign::plus_vg) ==
        doctest::Approx(0.25).epsilon(1e-10));
  CHECK(std::abs(linear_response(s, WeightSign::plus_vg)) < 1e-10);
}

TEST_CASE("continuation: frozen field leaves points in place, reversibility") {
  TorusMapFamily frozen = cat(0.0);
  TrigPoly2 g = cos_x1();
  TorusFixedSet base = lattice_fixed_points(frozen, g, 4);
  TorusFixedSet moved = continue_set(frozen, g, 4, 0.015);
  REQUIRE(moved.points.size() == base.points.size());
  for (size_t i = 0; i < base.points.size(); ++i)
    CHECK(torus_dist(base.points[i].c, moved.points[i].c) < 1e-12);

  TorusMapFamily fam = cat();
  for (int n : {1, 2, 3, 4, 5}) {
    TorusFixedSet at0 = lattice_fixed_points(fam, g, n);
    TorusFixedSet out = continue_between(fam, g, at0, 0.01);
    CHECK(out.t == doctest::Approx(0.01));
    TorusFixedSet back = continue_between(fam, g, out, 0.0);
    REQUIRE(back.points.size() == at0.points.size());
    for (size_t i = 0; i < at0.points.size(); ++i) {
      double best = 1.0;
      for (const TorusOrbit& q : back.points)
        best = std::min(best, torus_dist(at0.points[i].c, q.c));
      CHECK(best < 1e-10);
    }
  }
}

TEST_CASE("continued points satisfy the periodicity equation at t") {
  TorusMapFamily fam = cat();
  TrigPoly2 g = cos_x1();
  TorusFixedSet set = continue_set(fam, g, 4, 0.015);
  for (const TorusOrbit& p : set.points) {
    Vec2d x = p.c;
    for (int k = 0; k < 4; ++k) x = apply_map(fam, x, 0.015);
    CHECK(torus_dist(x, p.c) < 1e-11);
    CHECK(std::abs(p.det_shift) > 1e-6);  // transversality margin
  }
}

TEST_CASE("perturbed response: determinant route vs response formulas") {
  TorusMapFamily fam = cat();
  TrigPoly2 g = cos_x1();
  TraceSet tr = anosov_traces(fam, g, 6, 0.01);
  DetSeries<double> s = coefficients(tr);
  double r = linear_response(s, WeightSign::plus_vg);
  double ra = linear_response_alt(s, WeightSign::plus_vg);
  CHECK(r == doctest::Approx(ra).epsilon(1e-10).scale(1.0));
  // This family's response vanishes: A-images of the source field never hit
  // the observable frequency, so every susceptibility term is orthogonal.
  CHECK(std::abs(r) < 1e-7);
  ResponseReport rep = assemble_report(s, tr, WeightSign::plus_vg);
  CHECK(rep.has_abel);
  CHECK(std::abs(rep.abel_estimate) < 1e-6);
}

TEST_CASE("mean at a continued parameter matches the determinant slice") {
  TorusMapFamily fam = cat();
  TrigPoly2 g = cos_x1();
  const double t0 = 0.01;
  TraceSet tr = anosov_traces_at(fam, g, 8, t0);
  DetSeries<double> s = coefficients(tr);
  double mean_det = mean_observable(s, WeightSign::plus_vg);
  // cross-check against a long Birkhoff average at the same parameter
  BirkhoffEstimate be = birkhoff_mean(fam, g, t0, 2000000, 20240816);
  CHECK(std::abs(mean_det - be.mean) < std::max(5 * be.stderr_mean, 1e-4));
}

TEST_CASE("t-derivative traces are h-consistent under halving") {
  TorusMapFamily fam = cat();
  TrigPoly2 g = cos_x1();
  TraceSet th = anosov_traces(fam, g, 6, 0.01);
  TraceSet th2 = anosov_traces(fam, g, 6, 0.005);
  double num = 0.0, scale = 0.0;
  for (int n = 1; n <= 6; ++n) {
    num = std::max(num, std::abs(th.db_dt[n] - th2.db_dt[n]));
    num = std::max(num, std::abs(th.d2b_dudt[n] - th2.d2b_dudt[n]));
    scale = std::max({scale, std::abs(th.db_dt[n]), std::abs(th.d2b_dudt[n]),
                      std::abs(th.b[n])});
  }
  CHECK(num / scale < 1e-4);
}

TEST_CASE("h-consistency in strict relative form on an asymmetric field") {
  // A field with O(1) trace derivatives so the plain relative Richardson
  // residual is well conditioned.
  TorusMapFamily fam = cat();
  fam.P1.terms.push_back({1, 1, 0.4, 0.0});
  fam.P2.terms.push_back({0, 1, 0.0, 0.7});
  TrigPoly2 g = cos_x1();
  TraceSet th = anosov_traces(fam, g, 5, 0.008);
  TraceSet th2 = anosov_traces(fam, g, 5, 0.004);
  double sup = 0.0;
  for (int n = 1; n <= 5; ++n)
    sup = std::max({sup, std::abs(th.db_dt[n]), std::abs(th.d2b_dudt[n])});
  REQUIRE(sup > 1e-3);  // genuinely nonzero derivatives
  for (int n = 1; n <= 5; ++n) {
    CHECK(std::abs(th.db_dt[n] - th2.db_dt[n]) / sup < 1e-4);
    CHECK(std::abs(th.d2b_dudt[n] - th2.d2b_dudt[n]) / sup < 1e-4);
  }
}

TEST_CASE("torus coefficient decay diagnostic at a continued parameter") {
  TorusMapFamily fam = cat();
  TrigPoly2 g = cos_x1();
  TraceSet tr = anosov_traces_at(fam, g, 8, 0.015);
  DetSeries<double> s = coefficients(tr);
  // off the integrable point the coefficients are small but structured;
  // the fit must at least see enough points and report a contraction
  try {
    DecayFit fit = decay_fit(s, DecayMode::torus, 1e-15);
    CHECK(fit.npts >= 4);
    CHECK(fit.theta < 1.0);
  } catch (const std::runtime_error&) {
    // acceptable: coefficients may sit below the floor at this tiny t
    DetSeries<double> sd = s;
    int usable = 0;
    for (int n = 1; n <= sd.n_max; ++n)
      if (std::abs(sd.a[n]) > 1e-15) ++usable;
    CHECK(usable < 4);
  }
}

TEST_CASE("Birkhoff averages: seeded reproducibility and unperturbed limit") {
  TorusMapFamily fam = cat();
  TrigPoly2 g = cos_x1();
  BirkhoffEstimate a = birkhoff_mean(fam, g, 0.0, 1000000, 20240816);
  BirkhoffEstimate b = birkhoff_mean(fam, g, 0.0, 1000000, 20240816);
  CHECK(a.mean == b.mean);  // bitwise: same seed, same path
  CHECK(a.iters == 1000000);
  // t = 0: SRB is Lebesgue, the mean of cos(2 pi x1) is 0
  CHECK(std::abs(a.mean) < std::max(5 * a.stderr_mean, 1e-3));
  BirkhoffEstimate c = birkhoff_mean(fam, g, 0.0, 1000000, 20240817);
  CHECK(a.mean != c.mean);  // different seed explores a different orbit
  CHECK(std::abs(a.mean - c.mean) <
        6 * std::sqrt(a.stderr_mean * a.stderr_mean +
                      c.stderr_mean * c.stderr_mean) +
            1e-6);
  CHECK_THROWS_AS(birkhoff_mean(fam, g, 0.5, 1000, 1), std::domain_error);
}

TEST_CASE("threaded torus pipelines are bitwise identical to serial") {
  TorusMapFamily fam = cat();
  TrigPoly2 g = cos_x1();
  TraceSet a = anosov_traces(fam, g, 5, 0.01, 1);
  TraceSet b = anosov_traces(fam, g, 5, 0.01, 4);
  for (int n = 1; n <= 5; ++n) {
    CHECK(a.b[n] == b.b[n]);
    CHECK(a.db_du[n] == b.db_du[n]);
    CHECK(a.db_dt[n] == b.db_dt[n]);
    CHECK(a.d2b_dudt[n] == b.d2b_dudt[n]);
  }
}
