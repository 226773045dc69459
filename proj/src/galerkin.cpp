#include "linresp/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "linresp/numerics.hpp"

namespace linresp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double frac01(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

// (X phi)^(m) = sum_k Xhat(k) phihat(m - k), truncated to the frequency box.
Eigen::VectorXcd convolve(const TrigPoly& X, const Eigen::VectorXcd& phi,
                          int M) {
  int degX = X.max_freq();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(2 * M + 1);
  for (int m = -M; m <= M; ++m) {
    std::complex<double> s(0.0, 0.0);
    for (int k = -degX; k <= degX; ++k) {
      int mk = m - k;
      if (mk < -M || mk > M) continue;
      s += X.fourier(k) * phi[mk + M];
    }
    out[m + M] = s;
  }
  return out;
}

std::complex<double> pair_with(const TrigPoly& g, const Eigen::VectorXcd& phi,
                               int M) {
  if (g.max_freq() > M)
    throw std::invalid_argument("Galerkin order too small for observable");
  std::complex<double> s = g.fourier(0) * phi[M];
  for (int k = 1; k <= g.max_freq(); ++k)
    s += g.fourier(k) * phi[-k + M] + g.fourier(-k) * phi[k + M];
  return s;
}

}  // namespace

GalerkinOperator assemble_transfer(const CircleMapFamily& fam,
                                   const TrigPoly& g, double u, double t,
                                   int M, int K) {
  if (M < 1) throw std::invalid_argument("Galerkin order must be positive");
  if (K < 8 * M)
    throw std::runtime_error("quadrature underresolved: need K >= 8M");
  if (std::fabs(t) > fam.t_max * (1.0 + 1e-12))
    throw std::domain_error("|t| exceeds certified t_max");

  int D = 2 * M + 1;
  Eigen::MatrixXcd U(D, K), V(D, K);
  for (int j = 0; j < K; ++j) {
    double y = static_cast<double>(j) / static_cast<double>(K);
    double w = std::exp(-u * g.eval(y));
    double F = frac01(lift(fam, y, t));
    for (int m = -M; m <= M; ++m) {
      U(m + M, j) = std::polar(w, kTwoPi * m * y);
      V(m + M, j) = std::polar(1.0, -kTwoPi * m * F);
    }
  }
  GalerkinOperator op;
  op.M = M;
  op.K = K;
  op.E = (V * U.transpose()) / static_cast<double>(K);
  return op;
}

LeadingPair invariant_density(const GalerkinOperator& op) {
  int D = 2 * op.M + 1;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(D);
  v[op.M] = 1.0;
  bool converged = false;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXcd w = op.E * v;
    double nrm = w.lpNorm<Eigen::Infinity>();
    if (nrm == 0.0)
      throw std::runtime_error("no spectral gap at this resolution");
    w /= nrm;
    double diff = (w - v).lpNorm<Eigen::Infinity>();
    v = w;
    if (diff < 1e-15) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(op.E);
    if (ces.info() != Eigen::Success)
      throw std::runtime_error("no spectral gap at this resolution");
    int best = 0;
    for (int i = 1; i < D; ++i)
      if (std::abs(ces.eigenvalues()[i]) > std::abs(ces.eigenvalues()[best]))
        best = i;
    double l0 = std::abs(ces.eigenvalues()[best]);
    double l1 = 0.0;
    for (int i = 0; i < D; ++i)
      if (i != best) l1 = std::max(l1, std::abs(ces.eigenvalues()[i]));
    if (!(l0 > 0.0) || (l0 - l1) / l0 < 1e-8)
      throw std::runtime_error("no spectral gap at this resolution");
    v = ces.eigenvectors().col(best);
  }
  std::complex<double> mass = v[op.M];
  if (std::abs(mass) < 1e-12 * v.lpNorm<Eigen::Infinity>())
    throw std::runtime_error("leading mode has no mass at frequency zero");
  LeadingPair out;
  out.rho = v / mass;
  // Rayleigh quotient on the converged direction.
  std::complex<double> num = out.rho.dot(op.E * out.rho);
  out.eigenvalue = num.real() / out.rho.squaredNorm();
  return out;
}

std::vector<std::complex<double>> spectrum(const GalerkinOperator& op) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(op.E, false);
  if (ces.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue iteration failed");
  std::vector<std::complex<double>> ev(ces.eigenvalues().data(),
                                       ces.eigenvalues().data() +
                                           ces.eigenvalues().size());
  std::sort(ev.begin(), ev.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              double ma = std::abs(a), mb = std::abs(b);
              if (ma != mb) return ma > mb;
              return a.real() > b.real();
            });
  return ev;
}

double mean_of(const TrigPoly& g, const Eigen::VectorXcd& rho, int M) {
  return pair_with(g, rho, M).real();
}

double mean_at_t(const CircleMapFamily& fam, const TrigPoly& g, double t,
                 int M, int K) {
  GalerkinOperator op = assemble_transfer(fam, g, 0.0, t, M, K);
  return mean_of(g, invariant_density(op).rho, M);
}

double susceptibility_response(const CircleMapFamily& fam, const TrigPoly& g,
                               int M, int K, int n_terms) {
  GalerkinOperator op = assemble_transfer(fam, g, 0.0, 0.0, M, K);
  Eigen::VectorXcd rho = invariant_density(op).rho;

  // psi = (L0 (X rho))' in Fourier: convolve, apply E, multiply by 2 pi i m.
  Eigen::VectorXcd cur = op.E * convolve(fam.X, rho, op.M);
  for (int m = -op.M; m <= op.M; ++m)
    cur[m + op.M] *= std::complex<double>(0.0, kTwoPi * m);

  KahanSum acc;
  for (int n = 0; n < n_terms; ++n) {
    double term = pair_with(g, cur, op.M).real();
    acc.add(term);
    if (std::fabs(term) > 1e6)
      throw std::runtime_error("susceptibility series diverging");
    if (std::fabs(term) < 1e-13) break;
    cur = op.E * cur;
  }
  return -acc.value();
}

double finite_difference_response(const CircleMapFamily& fam,
                                  const TrigPoly& g, int M, int K, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  if (h > fam.t_max / 4.0 * (1.0 + 1e-12))
    throw std::invalid_argument("finite-difference step exceeds t_max/4");
  return richardson_derivative(
      [&](double t) { return mean_at_t(fam, g, t, M, K); }, h);
}

}  // namespace linresp
