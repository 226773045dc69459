#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "linresp/traces.hpp"
#include "linresp/trig_poly.hpp"

namespace linresp {

using Vec2d = std::array<double, 2>;
using Vec2l = std::array<std::int64_t, 2>;

struct Mat2l {
  std::int64_t a = 0, b = 0, c = 0, d = 0;  // [[a,b],[c,d]]
  std::int64_t det() const;
  std::int64_t trace() const { return a + d; }
};

Mat2l mat_mul(const Mat2l& x, const Mat2l& y);  // overflow-checked
Mat2l mat_pow(const Mat2l& x, int n);
Vec2l mat_apply(const Mat2l& m, const Vec2l& v);

// Perturbed hyperbolic automorphism F_t(x) = A x + t P(x) mod 1 with
// P = (P1, P2) a trigonometric polynomial vector field.
struct TorusMapFamily {
  Mat2l A;
  TrigPoly2 P1, P2;
  double t_max = 0.02;
};

// |det A| = 1 and |tr A| > 2, else the family is rejected.
void certify_hyperbolicity(const TorusMapFamily& fam);

// One periodic point of F_t^n together with its lift data:
// lifted fixed-point equation  F~_t^n(c) - c = L  with L integer.
struct TorusOrbit {
  Vec2d c{};                       // representative in [0,1)^2
  Vec2l L{};                       // lattice offset of the lift
  double gsum = 0.0;               // Birkhoff sum of g over the n-cycle
  std::array<double, 4> J{};      // D(F_t^n)(c), row-major
  double det_shift = 0.0;          // det(J - I)
};

struct TorusFixedSet {
  int n = 0;
  double t = 0.0;
  std::vector<TorusOrbit> points;  // sorted lexicographically by c
};

// Exact enumeration at t = 0 via the Smith form of A^n - I: positions are
// rationals reduced into [0,1)^2 with integer arithmetic, offsets exact.
TorusFixedSet lattice_fixed_points(const TorusMapFamily& fam,
                                   const TrigPoly2& g, int n);

// Predictor-corrector walk of an existing set from set.t to t_to (steps of
// at most 0.005); Newton on the lifted equation keeps each point on its
// branch (same L up to re-reduction into the fundamental domain).
TorusFixedSet continue_between(const TorusMapFamily& fam, const TrigPoly2& g,
                               const TorusFixedSet& from, double t_to,
                               int threads = 1);

// Enumerate at t = 0, then walk to t.
TorusFixedSet continue_set(const TorusMapFamily& fam, const TrigPoly2& g,
                           int n, double t, int threads = 1);

// Weighted trace sums over one set: weight e^{+v g_n} / |det(DF^n - I)|.
double trace_b_torus(const TorusFixedSet& set, double v = 0.0);
double trace_db_dv_torus(const TorusFixedSet& set, double v = 0.0);

// Traces and their t-derivatives at t = 0 assembled into the common layout:
// slot db_du holds d/dv, slot d2b_dudt holds d2/dv dt.  The t-derivatives
// come from Richardson differencing of continued sets at +-h, +-2h.
TraceSet anosov_traces(const TorusMapFamily& fam, const TrigPoly2& g,
                       int n_max, double fd_step, int threads = 1);

// b and d/dv at a fixed parameter t0 (t-derivative slots left at zero);
// feeds the mean-at-parameter cross-checks and off-origin decay fits.
TraceSet anosov_traces_at(const TorusMapFamily& fam, const TrigPoly2& g,
                          int n_max, double t0, int threads = 1);

struct BirkhoffEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::uint64_t iters = 0;
};

// Long-run time average of g from a seeded random start; batch-means error
// bar.  Lebesgue-generic starts see the SRB measure of the perturbed map.
BirkhoffEstimate birkhoff_mean(const TorusMapFamily& fam, const TrigPoly2& g,
                               double t, std::uint64_t iters,
                               std::uint64_t seed, int batches = 32,
                               std::uint64_t burn_in = 100000);

}  // namespace linresp
