#pragma once

#include "linresp/trig_poly.hpp"

namespace linresp {

// Analytic expanding circle map family via its lift
//   F_t(x) = D x + p0(x) + t X(x),
// with p0, X real trig polynomials and integer degree D >= 2.  The
// perturbation field X is attached at the source point: dF_t/dt (x) = X(x).
struct CircleMapFamily {
  int degree = 2;
  TrigPoly p0;
  TrigPoly X;
  double t_max = 0.05;
};

// Value and the partial derivatives of the lift used downstream.
struct MapJet {
  double value;  // F_t(x)
  double dx;     // dF/dx
  double dxx;    // d2F/dx2
  double dt;     // dF/dt  = X(x)
  double dtdx;   // d2F/dtdx = X'(x)
};

MapJet eval_bundle(const CircleMapFamily& fam, double x, double t);

// Lift and pointwise derivatives.
double lift(const CircleMapFamily& fam, double x, double t);
double lift_dx(const CircleMapFamily& fam, double x, double t);
double lift_dxx(const CircleMapFamily& fam, double x, double t);

// Uniform expansion certificate on |t| <= t_max:
//   lambda = D - S(p0) - t_max S(X),  S(p) = sum_k 2 pi k (|a_k| + |b_k|).
// Returns lambda; throws std::domain_error if lambda <= 1.
double certify_expansion(const CircleMapFamily& fam);

}  // namespace linresp
