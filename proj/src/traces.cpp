#include "linresp/traces.hpp"

#include <cmath>
#include <stdexcept>

#include "linresp/numerics.hpp"

namespace linresp {

namespace {

void guard_multiplier(const OrbitPointData& p) {
  if (p.Lambda - 1.0 <= kEpsGuard)
    throw std::domain_error("hyperbolicity margin lost: multiplier too close to 1");
}

double dt_numerator(const OrbitPointData& p) {
  return p.Xnp + p.C * p.Xn / (1.0 - p.Lambda);
}

}  // namespace

double trace_b(const FixedPointSet& fps) {
  KahanSum s;
  for (const auto& p : fps.points) {
    guard_multiplier(p);
    s.add(1.0 / (p.Lambda - 1.0));
  }
  return s.value();
}

double trace_db_du(const FixedPointSet& fps) {
  KahanSum s;
  for (const auto& p : fps.points) {
    guard_multiplier(p);
    s.add(-p.gsum / (p.Lambda - 1.0));
  }
  return s.value();
}

double trace_db_dt(const FixedPointSet& fps) {
  KahanSum s;
  for (const auto& p : fps.points) {
    guard_multiplier(p);
    double den = p.Lambda - 1.0;
    s.add(-dt_numerator(p) / (den * den));
  }
  return s.value();
}

double trace_d2b_dudt(const FixedPointSet& fps) {
  KahanSum s;
  for (const auto& p : fps.points) {
    guard_multiplier(p);
    double den = p.Lambda - 1.0;
    double first = dt_numerator(p) / (den * den) * p.gsum;
    double inner = 0.0;  // fixed k-order, all denominators share Lambda
    for (std::size_t k = 0; k < p.Xn_at.size(); ++k)
      inner += p.Xn_at[k] * p.gprime_at[k];
    s.add(first + inner / (den * den));
  }
  return s.value();
}

double trace_b_weighted(const FixedPointSet& fps, double u) {
  KahanSum s;
  for (const auto& p : fps.points) {
    guard_multiplier(p);
    s.add(std::exp(-u * p.gsum) / (p.Lambda - 1.0));
  }
  return s.value();
}

TraceSet compute_traces(const CircleMapFamily& fam, const TrigPoly& g, int n_max,
                        double t, int threads) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  TraceSet tr;
  tr.n_max = n_max;
  tr.b.assign(n_max + 1, 0.0);
  tr.db_du.assign(n_max + 1, 0.0);
  tr.db_dt.assign(n_max + 1, 0.0);
  tr.d2b_dudt.assign(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    FixedPointSet fps = enumerate_fixed_points(fam, g, n, t, threads);
    tr.b[n] = trace_b(fps);
    tr.db_du[n] = trace_db_du(fps);
    tr.db_dt[n] = trace_db_dt(fps);
    tr.d2b_dudt[n] = trace_d2b_dudt(fps);
  }
  return tr;
}

}  // namespace linresp
