#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace linresp {

// Real trigonometric polynomial on the circle,
//   p(x) = c0 + sum_{k=1}^{K} a_k cos(2 pi k x) + b_k sin(2 pi k x).
// Frequencies are stored densely: a[k-1], b[k-1] hold frequency k.
struct TrigPoly {
  double c0 = 0.0;
  std::vector<double> a;  // cosine coefficients
  std::vector<double> b;  // sine coefficients

  TrigPoly() = default;
  TrigPoly(double c, std::vector<double> ca, std::vector<double> sb);

  int max_freq() const;

  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  double operator()(double x) const { return eval(x); }

  // Analytic derivative as a new polynomial.
  TrigPoly derivative() const;

  // sum_k 2 pi k (|a_k| + |b_k|): uniform bound on |p'|.
  double deriv_sup_bound() const;

  // Fourier coefficient hat p(m) with p(x) = sum_m hat p(m) e^{2 pi i m x}.
  std::complex<double> fourier(std::int64_t m) const;

  bool is_zero() const;
};

TrigPoly operator+(const TrigPoly& p, const TrigPoly& q);
TrigPoly operator*(double s, const TrigPoly& p);

// Convenience builders.
TrigPoly trig_cos(int k, double amp = 1.0);
TrigPoly trig_sin(int k, double amp = 1.0);
TrigPoly trig_const(double c);

// One mode of a real trig polynomial on the 2-torus:
//   ca * cos(2 pi (k1 x1 + k2 x2)) + sa * sin(2 pi (k1 x1 + k2 x2)).
struct TrigTerm2 {
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  double ca = 0.0;
  double sa = 0.0;
};

struct TrigPoly2 {
  double c0 = 0.0;
  std::vector<TrigTerm2> terms;

  double eval(double x1, double x2) const;
  // Gradient and second partials; index 0 <-> x1, 1 <-> x2.
  void grad(double x1, double x2, double out[2]) const;
  void hess(double x1, double x2, double out[2][2]) const;
  bool is_zero() const;
  // sum over terms of 2 pi |k_i| (|ca| + |sa|), a sup bound on |d/dx_i|.
  double deriv_sup_bound(int axis) const;
};

}  // namespace linresp
