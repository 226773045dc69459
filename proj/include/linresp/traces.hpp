#pragma once

#include <vector>

#include "linresp/orbits.hpp"

namespace linresp {

// Weighted periodic-point sums of f_t^n and their parameter derivatives at
// (u, t) = (0, t).  Arrays are indexed by the period n; slot 0 is unused.
//
// For the torus pipeline the same container carries the e^{+v g} convention:
// db_du then holds d/dv traces and d2b_dudt holds d2/dv dt (see response
// module's weight-sign switch).
struct TraceSet {
  int n_max = 0;
  std::vector<double> b;
  std::vector<double> db_du;
  std::vector<double> db_dt;
  std::vector<double> d2b_dudt;
};

// b_n = sum_x 1/(Lambda - 1)
double trace_b(const FixedPointSet& fps);

// d/du b_n (0, t) = -sum_x gsum / (Lambda - 1)
double trace_db_du(const FixedPointSet& fps);

// d/dt b_n (0, 0) = -sum_x [Xn' + C Xn / (1 - Lambda)] / (Lambda - 1)^2
double trace_db_dt(const FixedPointSet& fps);

// d2/du dt b_n (0, 0)
//   = sum_x { [Xn' + C Xn/(1-Lambda)]/(Lambda-1)^2 * gsum
//             + 1/(Lambda-1) * sum_k Xn(x_k) g'(x_k) / (Lambda - 1) }
double trace_d2b_dudt(const FixedPointSet& fps);

// b_n(u, t) = sum_x e^{-u gsum} / (Lambda - 1): weighted slice on the same
// fixed points (they do not move with u).
double trace_b_weighted(const FixedPointSet& fps, double u);

// All four trace arrays for n = 1..n_max at parameter t.
TraceSet compute_traces(const CircleMapFamily& fam, const TrigPoly& g, int n_max,
                        double t = 0.0, int threads = 1);

}  // namespace linresp
