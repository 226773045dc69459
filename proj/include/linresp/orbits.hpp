#pragma once

#include <cstdint>
#include <vector>

#include "linresp/circle_map.hpp"
#include "linresp/trig_poly.hpp"

namespace linresp {

// Everything trace formulas need at one fixed point x of f_t^n.
// Forward recursions along the orbit x_k = f_t^k(x):
//   Lambda_{k+1} = f'(x_k) Lambda_k            (Lambda_0 = 1)
//   C_{k+1}      = f''(x_k) Lambda_k^2 + f'(x_k) C_k          (C_0 = 0)
//   X_{k+1}      = X(x_k) + f'(x_k) X_k                        (X_0 = 0)
//   X'_{k+1}     = X'(x_k) Lambda_k + f''(x_k) Lambda_k X_k + f'(x_k) X'_k
struct OrbitPointData {
  double x = 0.0;       // fixed point of f_t^n in [0,1)
  double Lambda = 0.0;  // (f_t^n)'(x)
  double C = 0.0;       // (f_t^n)''(x)
  double Xn = 0.0;      // d/dt f_t^n (x)
  double Xnp = 0.0;     // d/dx of the above
  double gsum = 0.0;    // sum_k g(x_k)
  std::vector<double> orbit;       // x_k, k = 0..n-1
  std::vector<double> Xn_at;       // X_n evaluated at each x_k
  std::vector<double> Lambda_at;   // multiplier started at x_k (all equal Lambda)
  std::vector<double> gprime_at;   // g'(x_k)
};

struct FixedPointSet {
  int n = 0;
  double t = 0.0;
  std::vector<OrbitPointData> points;  // sorted ascending by x
};

// Fixed points of f_t^n via the strictly monotone branch function
// x -> F_t^n(x) - x on [0,1): bisection then bracketed Newton per branch.
// Exactly D^n - 1 points.  Throws on overflow of D^n, loss of expansion,
// |t| > t_max, or Newton failure.
FixedPointSet enumerate_fixed_points(const CircleMapFamily& fam, const TrigPoly& g,
                                     int n, double t = 0.0, int threads = 1);

// Orbit data bundle at a single (already located) fixed point.
OrbitPointData orbit_bundle(const CircleMapFamily& fam, const TrigPoly& g,
                            double x, int n, double t = 0.0);

// Same forward recursions started from an arbitrary point (no periodicity
// assumed, no rotation pass).  fn is the unreduced lift iterate F_t^n(x),
// so d/dt fn and d/dx fn make sense for finite-difference cross-checks.
struct OrbitJet {
  double fn = 0.0;      // F_t^n(x), lift (not reduced mod 1)
  double Lambda = 0.0;  // (f_t^n)'(x)
  double C = 0.0;       // (f_t^n)''(x)
  double Xn = 0.0;      // d/dt F_t^n(x)
  double Xnp = 0.0;     // d/dx of the above
};
OrbitJet orbit_jet(const CircleMapFamily& fam, double x, int n, double t = 0.0);

// D^n as checked signed 64-bit; throws std::overflow_error.
std::int64_t checked_pow(std::int64_t base, int exp);

}  // namespace linresp
