#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "linresp/circle_map.hpp"
#include "linresp/trig_poly.hpp"

namespace linresp {

// Fourier-Galerkin discretization of the weighted transfer operator
//   (L phi)(x) = sum_{f_t(y)=x} e^{-u g(y)} phi(y) / f_t'(y),
// in the integral form entries[m'][m] = int e^{-2 pi i m' F_t(y)}
// e^{-u g(y)} e^{2 pi i m y} dy (change of variables absorbs 1/f' and the
// branch sum), quadratured on K uniform nodes.  Index i <-> frequency i - M.
struct GalerkinOperator {
  int M = 0;
  int K = 0;
  Eigen::MatrixXcd E;
};

// Frequency-indexed entry accessor, |m|, |mp| <= M.
inline std::complex<double> entry(const GalerkinOperator& op, int mp, int m) {
  return op.E(mp + op.M, m + op.M);
}

// K < 8M aliases the oscillatory integrand; refuse rather than return junk.
GalerkinOperator assemble_transfer(const CircleMapFamily& fam,
                                   const TrigPoly& g, double u, double t,
                                   int M, int K = 4096);

struct LeadingPair {
  double eigenvalue = 0.0;
  Eigen::VectorXcd rho;  // normalized so the frequency-zero coefficient is 1
};

// Leading eigenpair by power iteration with a dense-solver fallback.
LeadingPair invariant_density(const GalerkinOperator& op);

// Full discrete spectrum sorted by decreasing modulus.
std::vector<std::complex<double>> spectrum(const GalerkinOperator& op);

// int g rho for a density given by its Fourier coefficients.
double mean_of(const TrigPoly& g, const Eigen::VectorXcd& rho, int M);

// Mean of g in the f_t-invariant density at parameter t (u = 0).
double mean_at_t(const CircleMapFamily& fam, const TrigPoly& g, double t,
                 int M, int K = 4096);

// Susceptibility series for the additive family f_t = f + t X:
//   -sum_{n>=0} <g, L0^n [ (L0 (X rho0))' ]>,
// truncated at n_terms with early stop when a term falls below 1e-13.
double susceptibility_response(const CircleMapFamily& fam, const TrigPoly& g,
                               int M, int K = 4096, int n_terms = 400);

// Richardson-extrapolated central difference of t -> mean_at_t at step h,
// sampling t in {+-h, +-2h}; requires h <= t_max/4.
double finite_difference_response(const CircleMapFamily& fam,
                                  const TrigPoly& g, int M, int K, double h);

}  // namespace linresp
