#include "linresp/response.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "linresp/numerics.hpp"

namespace linresp {

namespace {

double sum_from1(const std::vector<double>& v) {
  KahanSum s;
  for (std::size_t n = 1; n < v.size(); ++n) s.add(v[n]);
  return s.value();
}

double sum_n_weighted(const std::vector<double>& v) {
  KahanSum s;
  for (std::size_t n = 1; n < v.size(); ++n)
    s.add(static_cast<double>(n) * v[n]);
  return s.value();
}

// d/dz of the truncated determinant at z = 1; it divides every
// implicit-function expression, so its distance from zero is the
// conditioning of the whole computation.
double dz_checked(const DetSeries<double>& s) {
  double dz = sum_n_weighted(s.a);
  if (std::fabs(dz) < 1e-6)
    throw std::runtime_error("leading zero not simple at truncation order");
  return dz;
}

double sign_of(WeightSign w) { return w == WeightSign::minus_ug ? -1.0 : 1.0; }

}  // namespace

double mean_observable(const DetSeries<double>& s, WeightSign w) {
  return sign_of(w) * sum_from1(s.da_du) / dz_checked(s);
}

double linear_response(const DetSeries<double>& s, WeightSign w) {
  double dz = dz_checked(s);
  double du = sum_from1(s.da_du);
  double dut = sum_from1(s.d2a_dudt);
  double dzt = sum_n_weighted(s.da_dt);
  double sg = sign_of(w);
  return sg * dut / dz - sg * du * dzt / (dz * dz);
}

double linear_response_alt(const DetSeries<double>& s, WeightSign w) {
  double dz = dz_checked(s);
  double dut = sum_from1(s.d2a_dudt);
  double dzt = sum_n_weighted(s.da_dt);
  double mean = mean_observable(s, w);
  return sign_of(w) * dut / dz - mean * dzt / dz;
}

AbelDiagnostic abel_diagnostic(const TraceSet& tr, WeightSign w, double mean) {
  (void)w;  // A itself is convention-free; the caller applies the sign.
  if (std::fabs(mean) >= 1e-8)
    throw std::runtime_error("observable not centered");
  int N = tr.n_max;
  if (N < 4)
    throw std::runtime_error("truncation order too small for tail read");
  auto A = [&](int n) { return tr.d2b_dudt[n] / static_cast<double>(n); };
  AbelDiagnostic d;
  d.estimate = A(N);
  for (int j = N - 2; j <= N; ++j)
    d.indicator = std::max(d.indicator, std::fabs(A(j) - A(j - 1)));
  return d;
}

ResponseReport assemble_report(const DetSeries<double>& s, const TraceSet& tr,
                               WeightSign w) {
  ResponseReport r;
  r.truncation_n = s.n_max;
  r.mean = mean_observable(s, w);
  r.response = linear_response(s, w);
  r.response_alt = linear_response_alt(s, w);
  int N = s.n_max;
  r.tail_indicator = std::max(
      {static_cast<double>(N) * std::fabs(s.a[N]), std::fabs(s.da_du[N]),
       static_cast<double>(N) * std::fabs(s.da_dt[N]),
       std::fabs(s.d2a_dudt[N])});
  if (std::fabs(r.mean) < 1e-8) {
    AbelDiagnostic d = abel_diagnostic(tr, w, r.mean);
    r.has_abel = true;
    r.abel_estimate = d.estimate;
    r.abel_indicator = d.indicator;
  }
  return r;
}

}  // namespace linresp
