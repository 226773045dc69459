#include "linresp/trig_poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace linresp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TrigPoly::TrigPoly(double c, std::vector<double> ca, std::vector<double> sb)
    : c0(c), a(std::move(ca)), b(std::move(sb)) {}

int TrigPoly::max_freq() const {
  return static_cast<int>(std::max(a.size(), b.size()));
}

double TrigPoly::eval(double x) const {
  double s = c0;
  std::size_t K = std::max(a.size(), b.size());
  for (std::size_t k = 1; k <= K; ++k) {
    double ph = kTwoPi * static_cast<double>(k) * x;
    if (k <= a.size() && a[k - 1] != 0.0) s += a[k - 1] * std::cos(ph);
    if (k <= b.size() && b[k - 1] != 0.0) s += b[k - 1] * std::sin(ph);
  }
  return s;
}

double TrigPoly::deriv(double x) const {
  double s = 0.0;
  std::size_t K = std::max(a.size(), b.size());
  for (std::size_t k = 1; k <= K; ++k) {
    double w = kTwoPi * static_cast<double>(k);
    double ph = w * x;
    if (k <= a.size() && a[k - 1] != 0.0) s -= a[k - 1] * w * std::sin(ph);
    if (k <= b.size() && b[k - 1] != 0.0) s += b[k - 1] * w * std::cos(ph);
  }
  return s;
}

double TrigPoly::deriv2(double x) const {
  double s = 0.0;
  std::size_t K = std::max(a.size(), b.size());
  for (std::size_t k = 1; k <= K; ++k) {
    double w = kTwoPi * static_cast<double>(k);
    double ph = w * x;
    if (k <= a.size() && a[k - 1] != 0.0) s -= a[k - 1] * w * w * std::cos(ph);
    if (k <= b.size() && b[k - 1] != 0.0) s -= b[k - 1] * w * w * std::sin(ph);
  }
  return s;
}

TrigPoly TrigPoly::derivative() const {
  // d/dx [a cos + b sin](2 pi k x) = 2 pi k [b cos - a sin](2 pi k x)
  std::size_t K = std::max(a.size(), b.size());
  TrigPoly d;
  d.a.assign(K, 0.0);
  d.b.assign(K, 0.0);
  for (std::size_t k = 1; k <= K; ++k) {
    double w = kTwoPi * static_cast<double>(k);
    double ak = k <= a.size() ? a[k - 1] : 0.0;
    double bk = k <= b.size() ? b[k - 1] : 0.0;
    d.a[k - 1] = w * bk;
    d.b[k - 1] = -w * ak;
  }
  return d;
}

double TrigPoly::deriv_sup_bound() const {
  double s = 0.0;
  std::size_t K = std::max(a.size(), b.size());
  for (std::size_t k = 1; k <= K; ++k) {
    double ak = k <= a.size() ? std::abs(a[k - 1]) : 0.0;
    double bk = k <= b.size() ? std::abs(b[k - 1]) : 0.0;
    s += kTwoPi * static_cast<double>(k) * (ak + bk);
  }
  return s;
}

std::complex<double> TrigPoly::fourier(std::int64_t m) const {
  if (m == 0) return {c0, 0.0};
  std::size_t k = static_cast<std::size_t>(m > 0 ? m : -m);
  if (k > std::max(a.size(), b.size())) return {0.0, 0.0};
  double ak = k <= a.size() ? a[k - 1] : 0.0;
  double bk = k <= b.size() ? b[k - 1] : 0.0;
  // a cos + b sin = (a - i b)/2 e^{+} + (a + i b)/2 e^{-}
  if (m > 0) return {ak / 2.0, -bk / 2.0};
  return {ak / 2.0, bk / 2.0};
}

bool TrigPoly::is_zero() const {
  if (c0 != 0.0) return false;
  for (double v : a)
    if (v != 0.0) return false;
  for (double v : b)
    if (v != 0.0) return false;
  return true;
}

TrigPoly operator+(const TrigPoly& p, const TrigPoly& q) {
  TrigPoly r;
  r.c0 = p.c0 + q.c0;
  r.a.assign(std::max(p.a.size(), q.a.size()), 0.0);
  r.b.assign(std::max(p.b.size(), q.b.size()), 0.0);
  for (std::size_t i = 0; i < p.a.size(); ++i) r.a[i] += p.a[i];
  for (std::size_t i = 0; i < q.a.size(); ++i) r.a[i] += q.a[i];
  for (std::size_t i = 0; i < p.b.size(); ++i) r.b[i] += p.b[i];
  for (std::size_t i = 0; i < q.b.size(); ++i) r.b[i] += q.b[i];
  return r;
}

TrigPoly operator*(double s, const TrigPoly& p) {
  TrigPoly r = p;
  r.c0 *= s;
  for (double& v : r.a) v *= s;
  for (double& v : r.b) v *= s;
  return r;
}

TrigPoly trig_cos(int k, double amp) {
  if (k <= 0) throw std::invalid_argument("trig_cos: frequency must be >= 1");
  TrigPoly p;
  p.a.assign(static_cast<std::size_t>(k), 0.0);
  p.a[static_cast<std::size_t>(k) - 1] = amp;
  return p;
}

TrigPoly trig_sin(int k, double amp) {
  if (k <= 0) throw std::invalid_argument("trig_sin: frequency must be >= 1");
  TrigPoly p;
  p.b.assign(static_cast<std::size_t>(k), 0.0);
  p.b[static_cast<std::size_t>(k) - 1] = amp;
  return p;
}

TrigPoly trig_const(double c) {
  TrigPoly p;
  p.c0 = c;
  return p;
}

double TrigPoly2::eval(double x1, double x2) const {
  double s = c0;
  for (const auto& t : terms) {
    double ph = kTwoPi * (static_cast<double>(t.k1) * x1 + static_cast<double>(t.k2) * x2);
    s += t.ca * std::cos(ph) + t.sa * std::sin(ph);
  }
  return s;
}

void TrigPoly2::grad(double x1, double x2, double out[2]) const {
  out[0] = out[1] = 0.0;
  for (const auto& t : terms) {
    double ph = kTwoPi * (static_cast<double>(t.k1) * x1 + static_cast<double>(t.k2) * x2);
    double d = -t.ca * std::sin(ph) + t.sa * std::cos(ph);
    out[0] += kTwoPi * static_cast<double>(t.k1) * d;
    out[1] += kTwoPi * static_cast<double>(t.k2) * d;
  }
}

void TrigPoly2::hess(double x1, double x2, double out[2][2]) const {
  out[0][0] = out[0][1] = out[1][0] = out[1][1] = 0.0;
  for (const auto& t : terms) {
    double ph = kTwoPi * (static_cast<double>(t.k1) * x1 + static_cast<double>(t.k2) * x2);
    double d2 = -t.ca * std::cos(ph) - t.sa * std::sin(ph);
    double w1 = kTwoPi * static_cast<double>(t.k1);
    double w2 = kTwoPi * static_cast<double>(t.k2);
    out[0][0] += w1 * w1 * d2;
    out[0][1] += w1 * w2 * d2;
    out[1][0] += w1 * w2 * d2;
    out[1][1] += w2 * w2 * d2;
  }
}

bool TrigPoly2::is_zero() const {
  if (c0 != 0.0) return false;
  for (const auto& t : terms)
    if (t.ca != 0.0 || t.sa != 0.0) return false;
  return true;
}

double TrigPoly2::deriv_sup_bound(int axis) const {
  double s = 0.0;
  for (const auto& t : terms) {
    double k = static_cast<double>(axis == 0 ? t.k1 : t.k2);
    s += kTwoPi * std::abs(k) * (std::abs(t.ca) + std::abs(t.sa));
  }
  return s;
}

}  // namespace linresp
