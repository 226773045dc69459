#include "linresp/anosov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "linresp/numerics.hpp"

namespace linresp {

namespace {

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_mul_overflow(x, y, &r))
    throw std::overflow_error("integer overflow in lattice arithmetic");
  return r;
}

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_add_overflow(x, y, &r))
    throw std::overflow_error("integer overflow in lattice arithmetic");
  return r;
}

std::int64_t checked_sub(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_sub_overflow(x, y, &r))
    throw std::overflow_error("integer overflow in lattice arithmetic");
  return r;
}

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den, r = num % den;
  return (r < 0) ? q - 1 : q;
}

double frac01(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

using Mat2d = std::array<double, 4>;  // row-major [[0,1],[2,3]]

// U * B * V = diag(d1, d2) with U, V unimodular; d1, d2 > 0.
struct Snf {
  Mat2l U, V;
  std::int64_t d1 = 0, d2 = 0;
};

Snf smith_form(Mat2l B) {
  Mat2l U{1, 0, 0, 1}, V{1, 0, 0, 1};
  auto swap_rows = [&] {
    std::swap(B.a, B.c);
    std::swap(B.b, B.d);
    std::swap(U.a, U.c);
    std::swap(U.b, U.d);
  };
  auto swap_cols = [&] {
    std::swap(B.a, B.b);
    std::swap(B.c, B.d);
    std::swap(V.a, V.b);
    std::swap(V.c, V.d);
  };
  auto row_sub = [&](std::int64_t q) {  // row1 -= q * row0
    B.c = checked_sub(B.c, checked_mul(q, B.a));
    B.d = checked_sub(B.d, checked_mul(q, B.b));
    U.c = checked_sub(U.c, checked_mul(q, U.a));
    U.d = checked_sub(U.d, checked_mul(q, U.b));
  };
  auto col_sub = [&](std::int64_t q) {  // col1 -= q * col0
    B.b = checked_sub(B.b, checked_mul(q, B.a));
    B.d = checked_sub(B.d, checked_mul(q, B.c));
    V.b = checked_sub(V.b, checked_mul(q, V.a));
    V.d = checked_sub(V.d, checked_mul(q, V.c));
  };
  for (int guard = 0; B.c != 0 || B.b != 0; ++guard) {
    if (guard > 256)
      throw std::runtime_error("Smith reduction did not terminate");
    if (B.c != 0) {
      if (B.a == 0) {
        swap_rows();
        continue;
      }
      row_sub(B.c / B.a);
      if (B.c != 0) swap_rows();
    } else {
      if (B.a == 0) {
        swap_cols();
        continue;
      }
      col_sub(B.b / B.a);
      if (B.b != 0) swap_cols();
    }
  }
  if (B.a < 0) {
    B.a = -B.a;
    U.a = -U.a;
    U.b = -U.b;
  }
  if (B.d < 0) {
    B.d = -B.d;
    U.c = -U.c;
    U.d = -U.d;
  }
  Snf s;
  s.U = U;
  s.V = V;
  s.d1 = B.a;
  s.d2 = B.d;
  return s;
}

Mat2l unimodular_inverse(const Mat2l& U) {
  std::int64_t det = U.det();
  if (det != 1 && det != -1)
    throw std::runtime_error("matrix is not unimodular");
  Mat2l inv{U.d, -U.b, -U.c, U.a};
  if (det == -1) {
    inv.a = -inv.a;
    inv.b = -inv.b;
    inv.c = -inv.c;
    inv.d = -inv.d;
  }
  return inv;
}

struct OrbitPass {
  Vec2d H{};     // lifted fixed-point residual
  Mat2d J{};     // D(F_t^n)
  Vec2d Vt{};    // d(F~_t^n)/dt along the orbit
  double gsum = 0.0;
};

// One forward sweep through the n-cycle starting at c with lattice offset L.
// Positions are kept reduced; the integer part of the lift is carried
// exactly, so the residual is accurate to a few ulps regardless of |A^n|.
OrbitPass orbit_pass(const TorusMapFamily& fam, const TrigPoly2& g,
                     const Vec2d& c, const Vec2l& L, double t, int n) {
  OrbitPass out;
  Vec2d y = c;
  Vec2l m{0, 0};
  Mat2d J{1.0, 0.0, 0.0, 1.0};
  Vec2d Vt{0.0, 0.0};
  KahanSum gs;
  const double Aa = static_cast<double>(fam.A.a);
  const double Ab = static_cast<double>(fam.A.b);
  const double Ac = static_cast<double>(fam.A.c);
  const double Ad = static_cast<double>(fam.A.d);
  for (int k = 0; k < n; ++k) {
    gs.add(g.eval(y[0], y[1]));
    double p1 = fam.P1.eval(y[0], y[1]);
    double p2 = fam.P2.eval(y[0], y[1]);
    double g1[2], g2[2];
    fam.P1.grad(y[0], y[1], g1);
    fam.P2.grad(y[0], y[1], g2);
    Mat2d DF{Aa + t * g1[0], Ab + t * g1[1], Ac + t * g2[0], Ad + t * g2[1]};
    Vec2d Vn{p1 + DF[0] * Vt[0] + DF[1] * Vt[1],
             p2 + DF[2] * Vt[0] + DF[3] * Vt[1]};
    Vt = Vn;
    Mat2d Jn{DF[0] * J[0] + DF[1] * J[2], DF[0] * J[1] + DF[1] * J[3],
             DF[2] * J[0] + DF[3] * J[2], DF[2] * J[1] + DF[3] * J[3]};
    J = Jn;
    double w1 = Aa * y[0] + Ab * y[1] + t * p1;
    double w2 = Ac * y[0] + Ad * y[1] + t * p2;
    std::int64_t s1 = static_cast<std::int64_t>(std::floor(w1));
    std::int64_t s2 = static_cast<std::int64_t>(std::floor(w2));
    y[0] = w1 - static_cast<double>(s1);
    y[1] = w2 - static_cast<double>(s2);
    if (y[0] >= 1.0) {
      y[0] -= 1.0;
      ++s1;
    }
    if (y[1] >= 1.0) {
      y[1] -= 1.0;
      ++s2;
    }
    Vec2l mn{checked_add(checked_add(checked_mul(fam.A.a, m[0]),
                                     checked_mul(fam.A.b, m[1])),
                         s1),
             checked_add(checked_add(checked_mul(fam.A.c, m[0]),
                                     checked_mul(fam.A.d, m[1])),
                         s2)};
    m = mn;
  }
  out.H = {y[0] - c[0] + static_cast<double>(checked_sub(m[0], L[0])),
           y[1] - c[1] + static_cast<double>(checked_sub(m[1], L[1]))};
  out.J = J;
  out.Vt = Vt;
  out.gsum = gs.value();
  return out;
}

// Solve (J - I) x = rhs for the 2x2 shifted cocycle.
Vec2d solve_shifted(const Mat2d& J, const Vec2d& rhs, double t) {
  double m00 = J[0] - 1.0, m01 = J[1], m10 = J[2], m11 = J[3] - 1.0;
  double det = m00 * m11 - m01 * m10;
  if (std::fabs(det) < kEpsGuard) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "hyperbolicity margin lost at t = %.6g", t);
    throw std::runtime_error(buf);
  }
  return {(m11 * rhs[0] - m01 * rhs[1]) / det,
          (-m10 * rhs[0] + m00 * rhs[1]) / det};
}

double sup2(const Vec2d& v) {
  return std::max(std::fabs(v[0]), std::fabs(v[1]));
}

// Newton on the lifted equation; returns the converged pass.
OrbitPass newton_correct(const TorusMapFamily& fam, const TrigPoly2& g,
                         Vec2d& c, const Vec2l& L, double t, int n) {
  for (int it = 0; it < 50; ++it) {
    OrbitPass p = orbit_pass(fam, g, c, L, t, n);
    if (sup2(p.H) <= 1e-12) return p;
    Vec2d d = solve_shifted(p.J, p.H, t);
    c[0] -= d[0];
    c[1] -= d[1];
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "hyperbolicity margin lost at t = %.6g", t);
  throw std::runtime_error(buf);
}

void sort_and_check(TorusFixedSet& set) {
  std::sort(set.points.begin(), set.points.end(),
            [](const TorusOrbit& p, const TorusOrbit& q) {
              if (p.c[0] != q.c[0]) return p.c[0] < q.c[0];
              return p.c[1] < q.c[1];
            });
  auto tdist = [](double a, double b) {
    double d = std::fabs(a - b);
    return std::min(d, 1.0 - d);
  };
  for (std::size_t i = 1; i < set.points.size(); ++i) {
    const Vec2d& p = set.points[i - 1].c;
    const Vec2d& q = set.points[i].c;
    if (tdist(p[0], q[0]) < 1e-8 && tdist(p[1], q[1]) < 1e-8) {
      char buf[96];
      std::snprintf(buf, sizeof buf,
                    "orbit collision during continuation at t = %.6g", set.t);
      throw std::runtime_error(buf);
    }
  }
}

void fill_derived(TorusOrbit& p, const OrbitPass& pass) {
  p.gsum = pass.gsum;
  p.J = pass.J;
  p.det_shift =
      (pass.J[0] - 1.0) * (pass.J[3] - 1.0) - pass.J[1] * pass.J[2];
}

double guarded_abs_det(const TorusOrbit& p) {
  double a = std::fabs(p.det_shift);
  if (a < kEpsGuard)
    throw std::domain_error(
        "hyperbolicity margin lost: shifted cocycle near singular");
  return a;
}

}  // namespace

std::int64_t Mat2l::det() const {
  return checked_sub(checked_mul(a, d), checked_mul(b, c));
}

Mat2l mat_mul(const Mat2l& x, const Mat2l& y) {
  return {checked_add(checked_mul(x.a, y.a), checked_mul(x.b, y.c)),
          checked_add(checked_mul(x.a, y.b), checked_mul(x.b, y.d)),
          checked_add(checked_mul(x.c, y.a), checked_mul(x.d, y.c)),
          checked_add(checked_mul(x.c, y.b), checked_mul(x.d, y.d))};
}

Mat2l mat_pow(const Mat2l& x, int n) {
  Mat2l r{1, 0, 0, 1};
  for (int i = 0; i < n; ++i) r = mat_mul(r, x);
  return r;
}

Vec2l mat_apply(const Mat2l& m, const Vec2l& v) {
  return {checked_add(checked_mul(m.a, v[0]), checked_mul(m.b, v[1])),
          checked_add(checked_mul(m.c, v[0]), checked_mul(m.d, v[1]))};
}

void certify_hyperbolicity(const TorusMapFamily& fam) {
  std::int64_t det = fam.A.det();
  if (det != 1 && det != -1)
    throw std::domain_error("automorphism must have determinant +-1");
  std::int64_t tr = fam.A.trace();
  if (tr <= 2 && tr >= -2)
    throw std::domain_error("automorphism not hyperbolic: |trace| <= 2");
  if (!(fam.t_max >= 0.0))
    throw std::domain_error("t_max must be nonnegative");
}

TorusFixedSet lattice_fixed_points(const TorusMapFamily& fam,
                                   const TrigPoly2& g, int n) {
  certify_hyperbolicity(fam);
  if (n < 1) throw std::invalid_argument("period must be positive");
  Mat2l An = mat_pow(fam.A, n);
  Mat2l B{checked_sub(An.a, 1), An.b, An.c, checked_sub(An.d, 1)};
  Snf s = smith_form(B);
  if (s.d1 <= 0 || s.d2 <= 0)
    throw std::domain_error("A^n - I is singular; automorphism not hyperbolic");
  std::int64_t count = checked_mul(s.d1, s.d2);
  if (count != std::llabs(B.det()))
    throw std::runtime_error("Smith form inconsistent with determinant");
  if (count > (std::int64_t{1} << 26))
    throw std::runtime_error("fixed-point count exceeds resource guard");
  Mat2l Uinv = unimodular_inverse(s.U);

  TorusFixedSet set;
  set.n = n;
  set.t = 0.0;
  set.points.reserve(static_cast<std::size_t>(count));
  const std::int64_t den = count;  // d1 * d2
  const double ddet = static_cast<double>(B.det());
  for (std::int64_t j1 = 0; j1 < s.d1; ++j1) {
    for (std::int64_t j2 = 0; j2 < s.d2; ++j2) {
      // x = V * (j1/d1, j2/d2) as exact rationals over den = d1*d2.
      std::int64_t num1 = checked_add(checked_mul(checked_mul(s.V.a, j1), s.d2),
                                      checked_mul(checked_mul(s.V.b, j2), s.d1));
      std::int64_t num2 = checked_add(checked_mul(checked_mul(s.V.c, j1), s.d2),
                                      checked_mul(checked_mul(s.V.d, j2), s.d1));
      std::int64_t f1 = floor_div(num1, den);
      std::int64_t f2 = floor_div(num2, den);
      std::int64_t r1 = checked_sub(num1, checked_mul(f1, den));
      std::int64_t r2 = checked_sub(num2, checked_mul(f2, den));
      TorusOrbit p;
      p.c = {static_cast<double>(r1) / static_cast<double>(den),
             static_cast<double>(r2) / static_cast<double>(den)};
      // B x = Uinv (j1, j2); reduction by (f1, f2) shifts it by -B f.
      Vec2l L0 = mat_apply(Uinv, Vec2l{j1, j2});
      Vec2l Bf = mat_apply(B, Vec2l{f1, f2});
      p.L = {checked_sub(L0[0], Bf[0]), checked_sub(L0[1], Bf[1])};

      // Exact rational orbit at t = 0: numerators mod den under A.
      std::int64_t a1 = r1, a2 = r2;
      KahanSum gs;
      for (int k = 0; k < n; ++k) {
        gs.add(g.eval(static_cast<double>(a1) / static_cast<double>(den),
                      static_cast<double>(a2) / static_cast<double>(den)));
        std::int64_t b1 = checked_add(checked_mul(fam.A.a, a1),
                                      checked_mul(fam.A.b, a2));
        std::int64_t b2 = checked_add(checked_mul(fam.A.c, a1),
                                      checked_mul(fam.A.d, a2));
        a1 = b1 % den;
        if (a1 < 0) a1 += den;
        a2 = b2 % den;
        if (a2 < 0) a2 += den;
      }
      p.gsum = gs.value();
      p.J = {static_cast<double>(An.a), static_cast<double>(An.b),
             static_cast<double>(An.c), static_cast<double>(An.d)};
      p.det_shift = ddet;
      set.points.push_back(p);
    }
  }
  sort_and_check(set);
  return set;
}

TorusFixedSet continue_between(const TorusMapFamily& fam, const TrigPoly2& g,
                               const TorusFixedSet& from, double t_to,
                               int threads) {
  certify_hyperbolicity(fam);
  if (std::fabs(t_to) > fam.t_max * (1.0 + 1e-12))
    throw std::domain_error("|t| exceeds certified t_max");
  TorusFixedSet set = from;
  set.t = t_to;
  if (t_to == from.t) return set;

  const int n = from.n;
  Mat2l An = mat_pow(fam.A, n);
  Mat2l B{checked_sub(An.a, 1), An.b, An.c, checked_sub(An.d, 1)};
  int steps = std::max(
      1, static_cast<int>(std::ceil(std::fabs(t_to - from.t) / 0.005)));
  parallel_for(set.points.size(), threads, [&](std::size_t i) {
    TorusOrbit& p = set.points[i];
    double t_prev = from.t;
    for (int st = 1; st <= steps; ++st) {
      double tk = from.t + (t_to - from.t) * static_cast<double>(st) /
                               static_cast<double>(steps);
      // Euler predictor along dc/dt = (I - J)^{-1} V at the current point.
      OrbitPass prev = orbit_pass(fam, g, p.c, p.L, t_prev, n);
      Vec2d dot = solve_shifted(prev.J, prev.Vt, t_prev);
      p.c[0] -= dot[0] * (tk - t_prev);  // (I-J)^{-1} = -(J-I)^{-1}
      p.c[1] -= dot[1] * (tk - t_prev);
      OrbitPass corr = newton_correct(fam, g, p.c, p.L, tk, n);
      fill_derived(p, corr);
      t_prev = tk;
    }
    // Re-reduce the representative; L moves by -B * floor(c).
    std::int64_t s1 = static_cast<std::int64_t>(std::floor(p.c[0]));
    std::int64_t s2 = static_cast<std::int64_t>(std::floor(p.c[1]));
    if (s1 != 0 || s2 != 0) {
      p.c[0] -= static_cast<double>(s1);
      p.c[1] -= static_cast<double>(s2);
      Vec2l Bs = mat_apply(B, Vec2l{s1, s2});
      p.L = {checked_sub(p.L[0], Bs[0]), checked_sub(p.L[1], Bs[1])};
      OrbitPass fin = newton_correct(fam, g, p.c, p.L, t_to, n);
      fill_derived(p, fin);
    }
  });
  sort_and_check(set);
  return set;
}

TorusFixedSet continue_set(const TorusMapFamily& fam, const TrigPoly2& g,
                           int n, double t, int threads) {
  TorusFixedSet set = lattice_fixed_points(fam, g, n);
  if (t == 0.0) return set;
  return continue_between(fam, g, set, t, threads);
}

double trace_b_torus(const TorusFixedSet& set, double v) {
  KahanSum s;
  for (const auto& p : set.points)
    s.add(std::exp(v * p.gsum) / guarded_abs_det(p));
  return s.value();
}

double trace_db_dv_torus(const TorusFixedSet& set, double v) {
  KahanSum s;
  for (const auto& p : set.points)
    s.add(p.gsum * std::exp(v * p.gsum) / guarded_abs_det(p));
  return s.value();
}

TraceSet anosov_traces(const TorusMapFamily& fam, const TrigPoly2& g,
                       int n_max, double fd_step, int threads) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("step must be positive");
  if (2.0 * fd_step > fam.t_max * (1.0 + 1e-12))
    throw std::invalid_argument("finite-difference step exceeds certified range");
  TraceSet tr;
  tr.n_max = n_max;
  tr.b.assign(n_max + 1, 0.0);
  tr.db_du.assign(n_max + 1, 0.0);
  tr.db_dt.assign(n_max + 1, 0.0);
  tr.d2b_dudt.assign(n_max + 1, 0.0);
  const double h = fd_step;
  for (int n = 1; n <= n_max; ++n) {
    TorusFixedSet s0 = lattice_fixed_points(fam, g, n);
    TorusFixedSet sp = continue_between(fam, g, s0, h, threads);
    TorusFixedSet sm = continue_between(fam, g, s0, -h, threads);
    TorusFixedSet sp2 = continue_between(fam, g, sp, 2.0 * h, threads);
    TorusFixedSet sm2 = continue_between(fam, g, sm, -2.0 * h, threads);
    tr.b[n] = trace_b_torus(s0);
    tr.db_du[n] = trace_db_dv_torus(s0);
    {
      double dh = (trace_b_torus(sp) - trace_b_torus(sm)) / (2.0 * h);
      double d2h = (trace_b_torus(sp2) - trace_b_torus(sm2)) / (4.0 * h);
      tr.db_dt[n] = (4.0 * dh - d2h) / 3.0;
    }
    {
      double dh =
          (trace_db_dv_torus(sp) - trace_db_dv_torus(sm)) / (2.0 * h);
      double d2h =
          (trace_db_dv_torus(sp2) - trace_db_dv_torus(sm2)) / (4.0 * h);
      tr.d2b_dudt[n] = (4.0 * dh - d2h) / 3.0;
    }
  }
  return tr;
}

TraceSet anosov_traces_at(const TorusMapFamily& fam, const TrigPoly2& g,
                          int n_max, double t0, int threads) {
  TraceSet tr;
  tr.n_max = n_max;
  tr.b.assign(n_max + 1, 0.0);
  tr.db_du.assign(n_max + 1, 0.0);
  tr.db_dt.assign(n_max + 1, 0.0);
  tr.d2b_dudt.assign(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    TorusFixedSet s = continue_set(fam, g, n, t0, threads);
    tr.b[n] = trace_b_torus(s);
    tr.db_du[n] = trace_db_dv_torus(s);
  }
  return tr;
}

BirkhoffEstimate birkhoff_mean(const TorusMapFamily& fam, const TrigPoly2& g,
                               double t, std::uint64_t iters,
                               std::uint64_t seed, int batches,
                               std::uint64_t burn_in) {
  certify_hyperbolicity(fam);
  if (std::fabs(t) > fam.t_max * (1.0 + 1e-12))
    throw std::domain_error("|t| exceeds certified t_max");
  if (batches < 2) throw std::invalid_argument("need at least two batches");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vec2d x{u01(rng), u01(rng)};
  const double Aa = static_cast<double>(fam.A.a);
  const double Ab = static_cast<double>(fam.A.b);
  const double Ac = static_cast<double>(fam.A.c);
  const double Ad = static_cast<double>(fam.A.d);
  auto step = [&](Vec2d& y) {
    double w1 = Aa * y[0] + Ab * y[1] + t * fam.P1.eval(y[0], y[1]);
    double w2 = Ac * y[0] + Ad * y[1] + t * fam.P2.eval(y[0], y[1]);
    y[0] = frac01(w1);
    y[1] = frac01(w2);
  };
  for (std::uint64_t k = 0; k < burn_in; ++k) step(x);
  std::uint64_t batch_len = iters / static_cast<std::uint64_t>(batches);
  if (batch_len == 0) throw std::invalid_argument("iteration budget too small");
  std::vector<double> bmean(static_cast<std::size_t>(batches), 0.0);
  for (int b = 0; b < batches; ++b) {
    KahanSum s;
    for (std::uint64_t k = 0; k < batch_len; ++k) {
      s.add(g.eval(x[0], x[1]));
      step(x);
    }
    bmean[static_cast<std::size_t>(b)] =
        s.value() / static_cast<double>(batch_len);
  }
  KahanSum tot;
  for (double m : bmean) tot.add(m);
  double mean = tot.value() / static_cast<double>(batches);
  KahanSum var;
  for (double m : bmean) var.add((m - mean) * (m - mean));
  double se = std::sqrt(var.value() /
                        (static_cast<double>(batches) *
                         static_cast<double>(batches - 1)));
  BirkhoffEstimate est;
  est.mean = mean;
  est.stderr_mean = se;
  est.iters = batch_len * static_cast<std::uint64_t>(batches);
  return est;
}

}  // namespace linresp
