#include "linresp/orbits.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "linresp/numerics.hpp"

namespace linresp {

namespace {

double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // guard against floor rounding at integers
  return f;
}

// Unreduced branch function h(x) = F_t^n(x) - x used for bracketing.
double branch_fn(const CircleMapFamily& fam, double x, double t, int n) {
  double y = x;
  for (int i = 0; i < n; ++i) y = lift(fam, y, t);
  return y - x;
}

struct Residual {
  double r;       // F_t^n(x) - x reduced to the nearest integer
  double Lambda;  // (f_t^n)'(x)
};

// Mod-1 reduced orbit keeps every map evaluation on [0,1), so the residual is
// computed at O(1) scale instead of O(D^n).
Residual reduced_residual(const CircleMapFamily& fam, double x, double t, int n) {
  double y = x;
  double Lambda = 1.0;
  for (int i = 0; i < n; ++i) {
    Lambda *= lift_dx(fam, y, t);
    y = frac(lift(fam, y, t));
  }
  double r = y - x;
  r -= std::round(r);
  return {r, Lambda};
}

// Solve F_t^n(x) - x = k on [0,1): bisection on the unreduced branch function
// until the bracket is narrow and the residual small enough for the reduced
// form to identify the branch, then bracketed Newton.
double solve_branch(const CircleMapFamily& fam, double t, int n, std::int64_t k) {
  const double target = static_cast<double>(k);
  double lo = 0.0, hi = 1.0;
  double hlo = branch_fn(fam, lo, t, n) - target;
  double hhi = branch_fn(fam, hi, t, n) - target;
  if (hlo > 0.0 || hhi < 0.0)
    throw std::runtime_error("fixed point bracket failure at n=" + std::to_string(n) +
                             " branch k=" + std::to_string(k));
  // hlo == 0 exactly: x = 0 is the root (e.g. pure sine nonlinearities).
  if (hlo == 0.0) return 0.0;

  for (int it = 0; it < 200; ++it) {
    bool narrow = (hi - lo) <= 1e-3;
    bool tame = std::abs(hlo) <= 0.3 && std::abs(hhi) <= 0.3;
    if (narrow && tame) break;
    double mid = 0.5 * (lo + hi);
    double hm = branch_fn(fam, mid, t, n) - target;
    if (hm >= 0.0) {
      hi = mid;
      hhi = hm;
    } else {
      lo = mid;
      hlo = hm;
    }
  }

  double x = 0.5 * (lo + hi);
  double Lambda = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 50; ++it) {
    auto [r, L] = reduced_residual(fam, x, t, n);
    Lambda = L;
    if (std::abs(r) <= 1e-15 * (1.0 + Lambda)) break;
    // monotone branch: keep the bracket consistent with the residual sign
    if (r > 0.0)
      hi = std::min(hi, x);
    else
      lo = std::max(lo, x);
    double step = -r / (Lambda - 1.0);
    double xn = x + step;
    if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 2.0 * eps * (std::abs(x) + eps)) {
      x = xn;
      break;
    }
    x = xn;
  }

  auto [r, L] = reduced_residual(fam, x, t, n);
  double bound = std::max(1e-13, 4.0 * eps * static_cast<double>(n) * (1.0 + L));
  if (std::abs(r) > bound)
    throw std::runtime_error("fixed point Newton did not converge at n=" +
                             std::to_string(n) + " branch k=" + std::to_string(k));
  return frac(x);
}

}  // namespace

std::int64_t checked_pow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / base)
      throw std::overflow_error("D^n overflows 64-bit integer");
    r *= base;
  }
  return r;
}

OrbitPointData orbit_bundle(const CircleMapFamily& fam, const TrigPoly& g,
                            double x, int n, double t) {
  OrbitPointData d;
  d.x = x;
  d.orbit.resize(n);
  std::vector<double> fp(n), Xv(n);

  double Lk = 1.0;   // (f^k)'
  double C = 0.0;    // (f^k)''
  double Xk = 0.0;   // d/dt f_t^k
  double Xkp = 0.0;  // d/dx of the above
  double y = x;
  for (int k = 0; k < n; ++k) {
    MapJet j = eval_bundle(fam, y, t);
    d.orbit[k] = y;
    fp[k] = j.dx;
    Xv[k] = j.dt;
    C = j.dxx * Lk * Lk + j.dx * C;
    double Xkp_next = j.dtdx * Lk + j.dxx * Lk * Xk + j.dx * Xkp;
    Xk = j.dt + j.dx * Xk;
    Xkp = Xkp_next;
    Lk *= j.dx;
    y = frac(j.value);
  }
  d.Lambda = Lk;
  d.C = C;
  d.Xn = Xk;
  d.Xnp = Xkp;

  if (d.Lambda - 1.0 <= kEpsGuard)
    throw std::domain_error("hyperbolicity margin lost: multiplier too close to 1");

  KahanSum gs;
  d.gprime_at.resize(n);
  for (int k = 0; k < n; ++k) {
    gs.add(g.eval(d.orbit[k]));
    d.gprime_at[k] = g.deriv(d.orbit[k]);
  }
  d.gsum = gs.value();

  // X_n started at each orbit point (needed by the mixed trace), and the
  // along-orbit multiplier identity check.
  d.Xn_at.resize(n);
  d.Lambda_at.resize(n);
  for (int k = 0; k < n; ++k) {
    double X = 0.0;
    double Lrot = 1.0;
    for (int j = 0; j < n; ++j) {
      int idx = (k + j) % n;
      X = Xv[idx] + fp[idx] * X;
      Lrot *= fp[idx];
    }
    d.Xn_at[k] = X;
    d.Lambda_at[k] = Lrot;
    if (std::abs(Lrot / d.Lambda - 1.0) > 1e-10)
      throw std::runtime_error("orbit multiplier not constant along cycle");
  }
  return d;
}

OrbitJet orbit_jet(const CircleMapFamily& fam, double x, int n, double t) {
  OrbitJet j{};
  double Lk = 1.0, C = 0.0, Xk = 0.0, Xkp = 0.0;
  double y = x;  // unreduced lift orbit: jets of trig data are 1-periodic
  for (int k = 0; k < n; ++k) {
    MapJet m = eval_bundle(fam, y, t);
    C = m.dxx * Lk * Lk + m.dx * C;
    double Xkp_next = m.dtdx * Lk + m.dxx * Lk * Xk + m.dx * Xkp;
    Xk = m.dt + m.dx * Xk;
    Xkp = Xkp_next;
    Lk *= m.dx;
    y = m.value;
  }
  j.fn = y;
  j.Lambda = Lk;
  j.C = C;
  j.Xn = Xk;
  j.Xnp = Xkp;
  return j;
}

FixedPointSet enumerate_fixed_points(const CircleMapFamily& fam, const TrigPoly& g,
                                     int n, double t, int threads) {
  if (n < 1) throw std::invalid_argument("period n must be >= 1");
  certify_expansion(fam);
  if (std::abs(t) > fam.t_max * (1.0 + 1e-12))
    throw std::domain_error("|t| exceeds certified t_max");

  std::int64_t Dn = checked_pow(fam.degree, n);
  std::int64_t count = Dn - 1;
  if (count > (std::int64_t{1} << 26))
    throw std::runtime_error("n too large: refusing to enumerate " +
                             std::to_string(count) + " fixed points");

  double h0 = branch_fn(fam, 0.0, t, n);
  std::int64_t k0 = static_cast<std::int64_t>(std::ceil(h0));

  FixedPointSet set;
  set.n = n;
  set.t = t;
  set.points.resize(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t i) {
    std::int64_t k = k0 + static_cast<std::int64_t>(i);
    double x = solve_branch(fam, t, n, k);
    set.points[i] = orbit_bundle(fam, g, x, n, t);
  });

  for (std::size_t i = 1; i < set.points.size(); ++i)
    if (!(set.points[i].x > set.points[i - 1].x + 1e-13))
      throw std::runtime_error("fixed points not distinct/ordered at n=" +
                               std::to_string(n));
  return set;
}

}  // namespace linresp
