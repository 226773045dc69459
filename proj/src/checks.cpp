#include "linresp/checks.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linresp/anosov.hpp"
#include "linresp/circle_map.hpp"
#include "linresp/determinant.hpp"
#include "linresp/galerkin.hpp"
#include "linresp/io_util.hpp"
#include "linresp/numerics.hpp"
#include "linresp/orbits.hpp"
#include "linresp/response.hpp"
#include "linresp/traces.hpp"
#include "linresp/trig_poly.hpp"

namespace linresp {

namespace {

namespace fs = std::filesystem;
constexpr double kPi = 3.14159265358979323846;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ---- pinned experiment families -------------------------------------------

CircleMapFamily doubling_family() {
  CircleMapFamily fam;
  fam.degree = 2;
  fam.t_max = 0.05;
  return fam;
}

// x |-> 2x + t sin(2 pi k x): k = 1 is the benchmark family as stated, k = 2
// the direction whose response actually is -pi (see the corrected check).
CircleMapFamily benchmark_family(int k) {
  CircleMapFamily fam = doubling_family();
  fam.X = trig_sin(k);
  return fam;
}

CircleMapFamily nonlinear_family() {
  CircleMapFamily fam = doubling_family();
  fam.p0 = trig_sin(1, 0.05);
  fam.X = trig_sin(1);
  return fam;
}

TorusMapFamily cat_family(bool perturbed) {
  TorusMapFamily fam;
  fam.A = Mat2l{2, 1, 1, 1};
  fam.t_max = 0.02;
  if (perturbed) {
    TrigTerm2 term;
    term.k1 = 1;
    term.k2 = 0;
    term.sa = 1.0;
    fam.P1.terms.push_back(term);
  }
  return fam;
}

TrigPoly2 cos_x1() {
  TrigPoly2 g;
  TrigTerm2 term;
  term.k1 = 1;
  term.k2 = 0;
  term.ca = 1.0;
  g.terms.push_back(term);
  return g;
}

// ---- harness ----------------------------------------------------------------

using Body = std::function<void(CheckResult&)>;

CheckResult run_check(const std::string& id, const std::string& name,
                      double budget_s, const Body& body) {
  CheckResult r;
  r.id = id;
  r.name = name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    r.pass = true;  // body clears it on any violated condition
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > budget_s) {
    r.pass = false;
    r.detail += std::string(r.detail.empty() ? "" : "; ") + "over time budget " +
                num(budget_s) + "s (took " + num(r.seconds) + "s)";
  }
  return r;
}

void expect(CheckResult& r, bool ok, const std::string& what) {
  if (!ok) {
    r.pass = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += "FAILED: " + what;
  }
}

// ---- individual checks -----------------------------------------------------

CheckResult check_doubling(const CheckContext& ctx) {
  return run_check("1", "doubling map exactness", 1.0, [&](CheckResult& r) {
    CircleMapFamily fam = doubling_family();
    TrigPoly g = trig_cos(1);
    TraceSet tr = compute_traces(fam, g, 12, 0.0, ctx.threads);
    double worst_b = 0.0;
    for (int n = 1; n <= 12; ++n) worst_b = std::max(worst_b, std::abs(tr.b[n] - 1.0));
    expect(r, worst_b <= 1e-12, "max |b_n - 1| = " + num(worst_b));

    DetSeries<double> s = coefficients(tr);
    expect(r, std::abs(s.a[1] + 1.0) <= 1e-12, "a_1 = " + num(s.a[1]));
    double worst_a = 0.0;
    for (int n = 2; n <= 10; ++n) worst_a = std::max(worst_a, std::abs(s.a[n]));
    expect(r, worst_a < 1e-12, "max |a_n|, 2<=n<=10 = " + num(worst_a));

    double z = smallest_zero(s);
    expect(r, std::abs(z - 1.0) <= 1e-12, "leading zero = " + num(z));
    r.detail += (r.detail.empty() ? "" : "; ");
    r.detail += "max|b_n-1|=" + num(worst_b) + ", a_1=" + num(s.a[1]) +
                ", max|a_n|=" + num(worst_a) + ", zero=" + num(z);
  });
}

void benchmark_three_routes(const CheckContext& ctx, int freq, CheckResult& r) {
  CircleMapFamily fam = benchmark_family(freq);
  TrigPoly g = trig_cos(1);

  TraceSet tr = compute_traces(fam, g, 10, 0.0, ctx.threads);
  DetSeries<double> s = coefficients(tr);
  double r_det = linear_response(s, WeightSign::minus_ug);
  double r_sus = susceptibility_response(fam, g, 64, 4096);
  double r_fd = finite_difference_response(fam, g, 64, 4096, 1e-3);

  expect(r, std::abs(r_det + kPi) <= 1e-6, "determinant response = " + num(r_det));
  expect(r, std::abs(r_sus + kPi) <= 1e-6, "susceptibility = " + num(r_sus));
  expect(r, std::abs(r_fd + kPi) <= 1e-6, "finite difference = " + num(r_fd));
  r.detail += (r.detail.empty() ? "" : "; ");
  r.detail += "expected -pi; determinant=" + num(r_det) + ", susceptibility=" +
              num(r_sus) + ", finite_difference=" + num(r_fd);
}

CheckResult check_benchmark_stated(const CheckContext& ctx) {
  return run_check(
      "2", "benchmark response, direction sin(2 pi x)", 5.0,
      [&](CheckResult& r) { benchmark_three_routes(ctx, 1, r); });
}

CheckResult check_benchmark_corrected(const CheckContext& ctx) {
  return run_check(
      "2c", "benchmark response, direction sin(4 pi x)", 5.0,
      [&](CheckResult& r) { benchmark_three_routes(ctx, 2, r); });
}

CheckResult check_nonlinear(const CheckContext& ctx) {
  return run_check("3", "nonlinear map against spectral oracles", 30.0,
                   [&](CheckResult& r) {
    CircleMapFamily fam = nonlinear_family();
    TrigPoly g = trig_cos(1);

    TraceSet tr = compute_traces(fam, g, 12, 0.0, ctx.threads);
    DetSeries<double> s = coefficients(tr);
    double mean_det = mean_observable(s, WeightSign::minus_ug);

    GalerkinOperator op = assemble_transfer(fam, g, 0.0, 0.0, 64, 4096);
    LeadingPair lead = invariant_density(op);
    double mean_gal = mean_of(g, lead.rho, op.M);
    expect(r, std::abs(mean_det - mean_gal) <= 1e-9,
           "mean mismatch " + num(mean_det - mean_gal));

    double r_det = linear_response(s, WeightSign::minus_ug);
    double r_fd = finite_difference_response(fam, g, 64, 4096, 1e-3);
    expect(r, std::abs(r_det - r_fd) <= 1e-5,
           "response mismatch " + num(r_det - r_fd));

    double z = smallest_zero(s);
    expect(r, std::abs(z - 1.0) <= 1e-9, "leading zero = " + num(z));

    r.detail += (r.detail.empty() ? "" : "; ");
    r.detail += "mean_det=" + num(mean_det) + ", mean_galerkin=" + num(mean_gal) +
                ", resp_det=" + num(r_det) + ", resp_fd=" + num(r_fd) +
                ", zero=" + num(z);
  });
}

CheckResult check_trace_identity(const CheckContext& ctx) {
  return run_check("4", "traces and determinant against the operator matrix",
                   30.0, [&](CheckResult& r) {
    CircleMapFamily fam = nonlinear_family();
    TrigPoly g = trig_cos(1);
    TraceSet tr = compute_traces(fam, g, 12, 0.0, ctx.threads);

    GalerkinOperator op = assemble_transfer(fam, g, 0.0, 0.0, 64, 4096);
    Eigen::MatrixXcd power = op.E;
    double worst_tr = 0.0;
    for (int n = 1; n <= 6; ++n) {
      double mat_trace = power.trace().real();
      worst_tr = std::max(worst_tr, std::abs(mat_trace - tr.b[n]));
      if (n < 6) power = power * op.E;
    }
    expect(r, worst_tr <= 1e-7, "max |b_n - tr E^n| = " + num(worst_tr));

    // Truncated series against the spectral product prod (1 - z lambda_i)
    // on a grid filling |z| <= 1.5.
    DetSeries<double> s = coefficients(tr);
    std::vector<std::complex<double>> lam = spectrum(op);
    double worst_d = 0.0;
    for (double rad : {0.3, 0.75, 1.1, 1.5}) {
      for (int k = 0; k < 12; ++k) {
        double ang = 2.0 * kPi * k / 12.0;
        std::complex<double> z = std::polar(rad, ang);
        std::complex<double> prod = 1.0;
        for (const auto& l : lam) prod *= (1.0 - z * l);
        std::complex<double> dv = eval_d(s, z).d;
        worst_d = std::max(worst_d, std::abs(dv - prod));
      }
    }
    expect(r, worst_d <= 1e-6, "max |d(z) - spectral product| = " + num(worst_d));
    r.detail += (r.detail.empty() ? "" : "; ");
    r.detail += "max|b_n-trE^n|=" + num(worst_tr) + ", max|d-prod|=" + num(worst_d);
  });
}

CheckResult check_derivative_fd(const CheckContext& ctx) {
  return run_check("5", "analytic orbit derivatives against finite differences",
                   30.0, [&](CheckResult& r) {
    CircleMapFamily fam = nonlinear_family();
    TrigPoly g = trig_cos(1);
    const double h = 1e-5;
    double worst = 0.0;
    std::string worst_what = "none";

    auto rel_check = [&](double fd, double an, double scale,
                         const std::string& what) {
      double rel = std::abs(fd - an) / std::max(scale, 1e-12);
      if (rel > worst) {
        worst = rel;
        worst_what = what;
      }
      expect(r, rel < 1e-5, what + " rel err " + num(rel));
    };

    for (int n = 1; n <= 6; ++n) {
      FixedPointSet fps = enumerate_fixed_points(fam, g, n, 0.0, ctx.threads);

      // Pointwise jets: scale each quantity by its sup over the point set.
      double sXn = 0.0, sXnp = 0.0, sC = 0.0;
      for (const auto& p : fps.points) {
        sXn = std::max(sXn, std::abs(p.Xn));
        sXnp = std::max(sXnp, std::abs(p.Xnp));
        sC = std::max(sC, std::abs(p.C));
      }
      for (const auto& p : fps.points) {
        OrbitJet tp = orbit_jet(fam, p.x, n, +h);
        OrbitJet tm = orbit_jet(fam, p.x, n, -h);
        rel_check((tp.fn - tm.fn) / (2 * h), p.Xn, sXn, "Xn(n=" + std::to_string(n) + ")");
        OrbitJet xp = orbit_jet(fam, p.x + h, n, 0.0);
        OrbitJet xm = orbit_jet(fam, p.x - h, n, 0.0);
        rel_check((xp.Xn - xm.Xn) / (2 * h), p.Xnp, sXnp,
                  "Xn'(n=" + std::to_string(n) + ")");
        rel_check((xp.Lambda - xm.Lambda) / (2 * h), p.C, sC,
                  "C(n=" + std::to_string(n) + ")");
      }

      // Trace-level derivatives: u-slice on frozen points, t-slice on
      // re-enumerated (Newton-tracked) points.
      double du_fd =
          (trace_b_weighted(fps, +h) - trace_b_weighted(fps, -h)) / (2 * h);
      rel_check(du_fd, trace_db_du(fps), std::abs(trace_db_du(fps)),
                "db_du(n=" + std::to_string(n) + ")");

      FixedPointSet fp_p = enumerate_fixed_points(fam, g, n, +h, ctx.threads);
      FixedPointSet fp_m = enumerate_fixed_points(fam, g, n, -h, ctx.threads);
      double dt_fd = (trace_b(fp_p) - trace_b(fp_m)) / (2 * h);
      rel_check(dt_fd, trace_db_dt(fps), std::abs(trace_db_dt(fps)),
                "db_dt(n=" + std::to_string(n) + ")");
      double dut_fd = (trace_db_du(fp_p) - trace_db_du(fp_m)) / (2 * h);
      rel_check(dut_fd, trace_d2b_dudt(fps), std::abs(trace_d2b_dudt(fps)),
                "d2b_dudt(n=" + std::to_string(n) + ")");
    }
    r.detail += (r.detail.empty() ? "" : "; ");
    r.detail += "worst rel err " + num(worst) + " (" + worst_what + ")";
  });
}

CheckResult check_decay(const CheckContext& ctx) {
  return run_check("6", "coefficient decay fit", 5.0, [&](CheckResult& r) {
    CircleMapFamily fam = nonlinear_family();
    TraceSet tr = compute_traces(fam, trig_cos(1), 12, 0.0, ctx.threads);
    DetSeries<double> s = coefficients(tr);
    DecayFit fit = decay_fit(s, DecayMode::circle);
    expect(r, fit.theta < 1.0, "theta = " + num(fit.theta));
    expect(r, fit.r2 > 0.9, "r2 = " + num(fit.r2));
    r.detail += (r.detail.empty() ? "" : "; ");
    r.detail += "theta=" + num(fit.theta) + ", r2=" + num(fit.r2) + ", points=" +
                std::to_string(fit.npts) + ", floor_n=" + std::to_string(fit.floor_n);
  });
}

CheckResult check_cat_unperturbed(const CheckContext&) {
  return run_check("7", "unperturbed cat map exactness", 5.0,
                   [&](CheckResult& r) {
    TorusMapFamily fam = cat_family(false);
    TrigPoly2 g = cos_x1();

    bool counts_ok = true;
    double worst_b = 0.0;
    TraceSet tr;
    tr.n_max = 10;
    tr.b.assign(11, 0.0);
    tr.db_du.assign(11, 0.0);
    tr.db_dt.assign(11, 0.0);
    tr.d2b_dudt.assign(11, 0.0);
    for (int n = 1; n <= 10; ++n) {
      TorusFixedSet set = lattice_fixed_points(fam, g, n);
      std::int64_t expected = mat_pow(fam.A, n).trace() - 2;
      if (static_cast<std::int64_t>(set.points.size()) != expected) counts_ok = false;
      double b = trace_b_torus(set);
      worst_b = std::max(worst_b, std::abs(b - 1.0));
      tr.b[n] = b;
      tr.db_du[n] = trace_db_dv_torus(set);
    }
    expect(r, counts_ok, "|Fix(A^n)| != tr(A^n) - 2 for some n <= 10");
    expect(r, worst_b <= 1e-12, "max |b_n - 1| = " + num(worst_b));

    DetSeries<double> s = coefficients(tr);
    expect(r, std::abs(s.a[1] + 1.0) <= 1e-12, "a_1 = " + num(s.a[1]));
    double worst_a = 0.0;
    for (int n = 2; n <= 10; ++n) worst_a = std::max(worst_a, std::abs(s.a[n]));
    expect(r, worst_a <= 1e-12, "max |a_n|, n>=2 = " + num(worst_a));
    double z = smallest_zero(s);
    expect(r, std::abs(z - 1.0) <= 1e-12, "leading zero = " + num(z));

    r.detail += (r.detail.empty() ? "" : "; ");
    r.detail += std::string("counts ") + (counts_ok ? "exact" : "WRONG") +
                ", max|b_n-1|=" + num(worst_b) + ", max|a_n|=" + num(worst_a) +
                ", zero=" + num(z);
  });
}

CheckResult check_cat_perturbed(const CheckContext& ctx) {
  return run_check("8", "perturbed cat map response", 180.0,
                   [&](CheckResult& r) {
    TorusMapFamily fam = cat_family(true);
    TrigPoly2 g = cos_x1();
    const int n_max = 8;
    const double h = 0.01;

    // (a) continuation reversibility 0 -> h -> 0 against the exact lattice.
    double worst_rev = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      TorusFixedSet s0 = lattice_fixed_points(fam, g, n);
      TorusFixedSet sp = continue_between(fam, g, s0, h, ctx.threads);
      TorusFixedSet back = continue_between(fam, g, sp, 0.0, ctx.threads);
      if (back.points.size() != s0.points.size())
        throw std::runtime_error("point count changed during continuation");
      for (const auto& p : back.points) {
        double best = 1e9;
        for (const auto& q : s0.points) {
          double d1 = std::abs(p.c[0] - q.c[0]);
          d1 = std::min(d1, 1.0 - d1);
          double d2 = std::abs(p.c[1] - q.c[1]);
          d2 = std::min(d2, 1.0 - d2);
          best = std::min(best, std::max(d1, d2));
        }
        worst_rev = std::max(worst_rev, best);
      }
    }
    expect(r, worst_rev <= 1e-10, "reversibility error " + num(worst_rev));

    // (b) determinant response against the finite-differenced determinant mean.
    TraceSet tr = anosov_traces(fam, g, n_max, h, ctx.threads);
    DetSeries<double> s = coefficients(tr);
    double resp = linear_response(s, WeightSign::plus_vg);
    auto mean_at = [&](double t) {
      TraceSet trt = anosov_traces_at(fam, g, n_max, t, ctx.threads);
      return mean_observable(coefficients(trt), WeightSign::plus_vg);
    };
    double resp_fd = richardson_derivative(mean_at, 0.005);
    expect(r, std::abs(resp - resp_fd) <= 1e-3,
           "determinant vs FD mean: " + num(resp) + " vs " + num(resp_fd));

    // (c) Birkhoff slope with 1e8 iterates per parameter value.
    BirkhoffEstimate bp = birkhoff_mean(fam, g, +h, 100000000ull, 20240816ull);
    BirkhoffEstimate bm = birkhoff_mean(fam, g, -h, 100000000ull, 20240817ull);
    double slope = (bp.mean - bm.mean) / (2 * h);
    double sigma = std::hypot(bp.stderr_mean, bm.stderr_mean) / (2 * h);
    expect(r, std::abs(slope - resp) <= 1e-2,
           "Birkhoff slope " + num(slope) + " vs response " + num(resp));

    r.detail += (r.detail.empty() ? "" : "; ");
    r.detail += "reversibility=" + num(worst_rev) + ", response=" + num(resp) +
                ", fd_mean_slope=" + num(resp_fd) + ", birkhoff_slope=" +
                num(slope) + " (sigma " + num(sigma) + ")";
  });
}

// ---- determinism probe ------------------------------------------------------

int run_cmd(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
  return -2;
}

CheckResult check_determinism(const CheckContext& ctx) {
  return run_check("9", "artifact determinism across thread counts", 120.0,
                   [&](CheckResult& r) {
    if (ctx.cli_path.empty() || ctx.config_dir.empty())
      throw std::runtime_error(
          "determinism probe needs the CLI path and the config directory");
    fs::path circle_cfg = fs::path(ctx.config_dir) / "nonlinear.toml";
    fs::path torus_cfg = fs::path(ctx.config_dir) / "catmap_probe.toml";
    if (!fs::exists(circle_cfg) || !fs::exists(torus_cfg))
      throw std::runtime_error("probe configs not found under " + ctx.config_dir);

    fs::path work = fs::temp_directory_path() /
                    ("linresp-determinism-" + std::to_string(::getpid()));
    fs::remove_all(work);

    struct Probe {
      std::string sub;
      std::string cfg;
      std::string extra;
      std::string artifact;
    };
    std::vector<Probe> probes = {
        {"dump-orbits", circle_cfg.string(), "--nmax 8", "orbits.csv"},
        {"traces", circle_cfg.string(), "--nmax 10", "traces.csv"},
        {"coeffs", circle_cfg.string(), "--fit", "coeffs.csv"},
        {"response", circle_cfg.string(), "", "response.json"},
        {"traces", torus_cfg.string(), "", "torus_traces.csv"},
        {"anosov-response", torus_cfg.string(), "", "anosov.json"},
    };

    for (int threads : {1, 8}) {
      fs::path dir = work / ("t" + std::to_string(threads));
      fs::create_directories(dir);
      for (const auto& p : probes) {
        fs::path out = dir / p.artifact;
        std::string cmd = "'" + ctx.cli_path + "' " + p.sub + " --config '" +
                          p.cfg + "' --threads " + std::to_string(threads) +
                          (p.extra.empty() ? "" : " " + p.extra) + " --out '" +
                          out.string() + "' > '" + out.string() + ".log' 2>&1";
        int rc = run_cmd(cmd);
        if (rc != 0)
          throw std::runtime_error(p.sub + " exited with status " +
                                   std::to_string(rc) + " (threads " +
                                   std::to_string(threads) + ", log " +
                                   out.string() + ".log)");
      }
    }

    bool all_same = true;
    std::string first_diff;
    std::vector<std::string> artifacts;
    for (const auto& p : probes) {
      artifacts.push_back(p.artifact);
      if (p.artifact == "coeffs.csv") artifacts.push_back("coeffs.csv.fit.json");
      if (p.artifact == "anosov.json") artifacts.push_back("anosov.json.traces.csv");
    }
    for (const auto& name : artifacts) {
      std::string a = read_text_file((work / "t1" / name).string());
      std::string b = read_text_file((work / "t8" / name).string());
      if (a != b) {
        all_same = false;
        if (first_diff.empty()) first_diff = name;
      }
    }
    expect(r, all_same, "artifact differs between thread counts: " + first_diff);
    if (all_same) {
      fs::remove_all(work);
      r.detail += (r.detail.empty() ? "" : "; ");
      r.detail += std::to_string(artifacts.size()) +
                  " artifacts byte-identical at --threads 1 vs 8";
    } else {
      r.detail += " (kept " + work.string() + ")";
    }
  });
}

}  // namespace

std::vector<CheckResult> run_standard_checks(const CheckContext& ctx) {
  std::vector<CheckResult> out;
  out.push_back(check_doubling(ctx));
  out.push_back(check_benchmark_stated(ctx));
  out.push_back(check_benchmark_corrected(ctx));
  out.push_back(check_nonlinear(ctx));
  out.push_back(check_trace_identity(ctx));
  out.push_back(check_derivative_fd(ctx));
  out.push_back(check_decay(ctx));
  out.push_back(check_cat_unperturbed(ctx));
  out.push_back(check_cat_perturbed(ctx));
  out.push_back(check_determinism(ctx));
  return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace linresp
