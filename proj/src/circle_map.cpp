#include "linresp/circle_map.hpp"

#include <cmath>
#include <stdexcept>

namespace linresp {

MapJet eval_bundle(const CircleMapFamily& fam, double x, double t) {
  MapJet j;
  double D = static_cast<double>(fam.degree);
  j.value = D * x + fam.p0.eval(x) + t * fam.X.eval(x);
  j.dx = D + fam.p0.deriv(x) + t * fam.X.deriv(x);
  j.dxx = fam.p0.deriv2(x) + t * fam.X.deriv2(x);
  j.dt = fam.X.eval(x);
  j.dtdx = fam.X.deriv(x);
  return j;
}

double lift(const CircleMapFamily& fam, double x, double t) {
  return static_cast<double>(fam.degree) * x + fam.p0.eval(x) + t * fam.X.eval(x);
}

double lift_dx(const CircleMapFamily& fam, double x, double t) {
  return static_cast<double>(fam.degree) + fam.p0.deriv(x) + t * fam.X.deriv(x);
}

double lift_dxx(const CircleMapFamily& fam, double x, double t) {
  return fam.p0.deriv2(x) + t * fam.X.deriv2(x);
}

double certify_expansion(const CircleMapFamily& fam) {
  if (fam.degree < 2) throw std::domain_error("degree must be an integer >= 2");
  if (!(fam.t_max >= 0)) throw std::domain_error("t_max must be >= 0");
  double S = fam.p0.deriv_sup_bound() + fam.t_max * fam.X.deriv_sup_bound();
  double lambda = static_cast<double>(fam.degree) - S;
  if (!(lambda > 1.0))
    throw std::domain_error("not uniformly expanding on |t| <= t_max");
  return lambda;
}

}  // namespace linresp
