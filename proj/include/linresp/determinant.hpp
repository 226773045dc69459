#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "linresp/traces.hpp"

namespace linresp {

// Coefficient arithmetic is written against an abstract real scalar so a wider
// type can be substituted; binary64 is the default.  The precision floor used
// by decay diagnostics is tied to the scalar.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr double coeff_floor = 1e-14;
};

template <>
struct ScalarTraits<long double> {
  static constexpr long double coeff_floor = 1e-17L;
};

// Taylor coefficients a_n(0,0) of the determinant in z together with the
// first u- and t-derivatives and the mixed second derivative; index n,
// a[0] = 1 and all derivative arrays start at 0.
template <class S>
struct DetSeries {
  int n_max = 0;
  std::vector<S> a, da_du, da_dt, d2a_dudt;
};

// Plemelj-Smithies style recursion from the traces:
//   n a_n = -sum_{j=0}^{n-1} a_j b_{n-j}, differentiated in u, t and u,t.
template <class S = double>
DetSeries<S> coefficients(const TraceSet& tr) {
  int N = tr.n_max;
  DetSeries<S> out;
  out.n_max = N;
  out.a.assign(N + 1, S(0));
  out.da_du.assign(N + 1, S(0));
  out.da_dt.assign(N + 1, S(0));
  out.d2a_dudt.assign(N + 1, S(0));
  out.a[0] = S(1);
  for (int n = 1; n <= N; ++n) {
    S sa(0), su(0), st(0), sut(0);
    for (int j = 0; j < n; ++j) {
      S bb = static_cast<S>(tr.b[n - j]);
      S bu = static_cast<S>(tr.db_du[n - j]);
      S bt = static_cast<S>(tr.db_dt[n - j]);
      S but = static_cast<S>(tr.d2b_dudt[n - j]);
      sa += out.a[j] * bb;
      su += out.da_du[j] * bb + out.a[j] * bu;
      st += out.da_dt[j] * bb + out.a[j] * bt;
      sut += out.d2a_dudt[j] * bb + out.da_du[j] * bt + out.da_dt[j] * bu +
             out.a[j] * but;
    }
    S m = S(-1) / S(n);
    out.a[n] = m * sa;
    out.da_du[n] = m * su;
    out.da_dt[n] = m * st;
    out.d2a_dudt[n] = m * sut;
  }
  return out;
}

// Truncated determinant value and partials at a point z.  Z may be the real
// scalar itself or a complex type over it.
template <class Z>
struct DetValue {
  Z d{};      // d(z)
  Z dz{};     // d/dz
  Z du{};     // d/du
  Z dt{};     // d/dt
  Z dzt{};    // d2/dz dt
  Z dut{};    // d2/du dt
};

template <class S, class Z>
DetValue<Z> eval_d(const DetSeries<S>& s, Z z) {
  DetValue<Z> v;
  // Horner in reverse index; zp tracks z^n when needed for derivative forms.
  for (int n = s.n_max; n >= 0; --n) {
    Z an = Z(s.a[n]);
    v.d = v.d * z + an;
    v.du = v.du * z + Z(s.da_du[n]);
    v.dt = v.dt * z + Z(s.da_dt[n]);
    v.dut = v.dut * z + Z(s.d2a_dudt[n]);
    if (n >= 1) {
      v.dz = v.dz * z + Z(static_cast<S>(n)) * Z(s.a[n]);
      v.dzt = v.dzt * z + Z(static_cast<S>(n)) * Z(s.da_dt[n]);
    }
  }
  return v;
}

// Newton from z = 1 with half-step damping on overshoot; the leading zero of
// the truncated determinant.  Termination contract: |d| < 1e-12 and
// |d'| > 1e-6, else an error.
template <class S>
S smallest_zero(const DetSeries<S>& s) {
  S z = S(1);
  auto absval = [](S x) { return x < S(0) ? -x : x; };
  S fz = absval(eval_d(s, z).d);
  for (int it = 0; it < 100; ++it) {
    DetValue<S> v = eval_d(s, z);
    fz = absval(v.d);
    if (absval(v.dz) <= S(1e-6))
      throw std::runtime_error("zero not localized / not simple");
    S step = v.d / v.dz;
    S zn = z - step;
    int halvings = 0;
    while (halvings < 60 && absval(eval_d(s, zn).d) > fz) {
      step = step / S(2);
      zn = z - step;
      ++halvings;
    }
    if (zn == z) break;
    z = zn;
    if (absval(step) < S(1e-16) && absval(eval_d(s, z).d) < S(1e-12)) break;
  }
  DetValue<S> v = eval_d(s, z);
  if (!(absval(v.d) < S(1e-12)) || !(absval(v.dz) > S(1e-6)))
    throw std::runtime_error("zero not localized / not simple");
  return z;
}

enum class DecayMode { circle, torus };

struct DecayFit {
  double theta = 0.0;    // exp(slope); contraction requires theta < 1
  double beta = 0.0;     // -slope (torus exponent rate)
  double r2 = 0.0;
  int floor_n = 0;       // largest n that cleared the precision floor
  std::size_t npts = 0;
};

// Least squares of log|a_n| against n^2 (circle) or n^{3/2} (torus) over
// coefficients above the precision floor; requires >= 4 usable points.
DecayFit decay_fit_values(const std::vector<double>& a_from_zero, DecayMode mode,
                          double floor = ScalarTraits<double>::coeff_floor);

inline DecayFit decay_fit(const DetSeries<double>& s, DecayMode mode,
                          double floor = ScalarTraits<double>::coeff_floor) {
  return decay_fit_values(s.a, mode, floor);
}

}  // namespace linresp
