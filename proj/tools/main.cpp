// linresp: linear response of expanding circle maps and perturbed cat maps
// from periodic-orbit data, with spectral and sampling cross-checks.

#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "linresp/anosov.hpp"
#include "linresp/checks.hpp"
#include "linresp/config.hpp"
#include "linresp/determinant.hpp"
#include "linresp/io_util.hpp"
#include "linresp/orbits.hpp"
#include "linresp/response.hpp"
#include "linresp/traces.hpp"

namespace {

using linresp::CsvBuilder;
using linresp::DetSeries;
using linresp::ExperimentConfig;
using linresp::fmt17;
using linresp::ModelKind;
using linresp::ScalarKind;
using linresp::TraceSet;
using linresp::WeightSign;
using nlohmann::json;

// Common per-subcommand options; flags override environment overrides,
// which override the file.
struct CommonArgs {
  std::string config_path;
  std::string out;
  int n_max = 0;
  int threads = 0;
  std::uint64_t seed = 0;
  bool fit = false;

  CLI::Option* out_opt = nullptr;
  CLI::Option* nmax_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* fit_opt = nullptr;
};

void attach_common(CLI::App* sub, CommonArgs& args, bool with_fit) {
  sub->add_option("--config", args.config_path, "experiment config (TOML)");
  args.out_opt = sub->add_option("--out", args.out, "output path (default stdout)");
  args.nmax_opt = sub->add_option("--nmax", args.n_max, "truncation order");
  args.threads_opt = sub->add_option("--threads", args.threads, "worker threads");
  args.seed_opt = sub->add_option("--seed", args.seed, "sampling seed");
  if (with_fit)
    args.fit_opt = sub->add_flag("--fit", args.fit, "append decay-fit report");
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  std::string path = args.config_path;
  if (path.empty())
    if (const char* env = std::getenv("LINRESP_CONFIG")) path = env;
  if (path.empty())
    throw std::runtime_error("missing --config (or LINRESP_CONFIG)");
  ExperimentConfig cfg = linresp::load_config(path);
  linresp::apply_env_overrides(cfg);
  if (args.nmax_opt && args.nmax_opt->count()) {
    if (args.n_max < 1 || args.n_max > 64)
      throw std::runtime_error("--nmax out of range [1, 64]");
    cfg.n_max = args.n_max;
  }
  if (args.threads_opt && args.threads_opt->count()) {
    if (args.threads < 1 || args.threads > 256)
      throw std::runtime_error("--threads out of range [1, 256]");
    cfg.threads = args.threads;
  }
  if (args.out_opt && args.out_opt->count()) cfg.out = args.out;
  if (args.seed_opt && args.seed_opt->count()) cfg.birkhoff.seed = args.seed;
  if (args.fit_opt && args.fit_opt->count()) cfg.fit = args.fit;
  return cfg;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty())
    std::cout << content;
  else
    linresp::write_text_file(out, content);
}

void require_model(const ExperimentConfig& cfg, ModelKind want, const char* sub) {
  if (cfg.model != want)
    throw std::runtime_error(std::string(sub) + " requires a " +
                             (want == ModelKind::circle ? "circle" : "torus") +
                             " config");
}

TraceSet traces_for(const ExperimentConfig& cfg) {
  if (cfg.model == ModelKind::circle)
    return linresp::compute_traces(cfg.circle, cfg.g, cfg.n_max, 0.0, cfg.threads);
  return linresp::anosov_traces(cfg.torus, cfg.g2, cfg.n_max, cfg.fd.step,
                                cfg.threads);
}

DetSeries<double> to_double_series(const DetSeries<long double>& s) {
  DetSeries<double> out;
  out.n_max = s.n_max;
  auto shrink = [](const std::vector<long double>& v) {
    std::vector<double> o(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) o[i] = static_cast<double>(v[i]);
    return o;
  };
  out.a = shrink(s.a);
  out.da_du = shrink(s.da_du);
  out.da_dt = shrink(s.da_dt);
  out.d2a_dudt = shrink(s.d2a_dudt);
  return out;
}

// Coefficient series honoring the configured scalar width; the wide path
// runs the recursion in long double and rounds once at the end.
DetSeries<double> series_for(const ExperimentConfig& cfg, const TraceSet& tr) {
  if (cfg.scalar == ScalarKind::extended)
    return to_double_series(linresp::coefficients<long double>(tr));
  return linresp::coefficients<double>(tr);
}

int cmd_dump_orbits(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  require_model(cfg, ModelKind::circle, "dump-orbits");
  CsvBuilder csv;
  csv.row({"n", "k", "x", "Lambda", "C", "Xn", "Xn_prime", "gsum"});
  for (int n = 1; n <= cfg.n_max; ++n) {
    linresp::FixedPointSet fps =
        linresp::enumerate_fixed_points(cfg.circle, cfg.g, n, 0.0, cfg.threads);
    for (std::size_t k = 0; k < fps.points.size(); ++k) {
      const auto& p = fps.points[k];
      csv.row({std::to_string(n), std::to_string(k), fmt17(p.x), fmt17(p.Lambda),
               fmt17(p.C), fmt17(p.Xn), fmt17(p.Xnp), fmt17(p.gsum)});
    }
  }
  emit(cfg.out, csv.str());
  return 0;
}

int cmd_traces(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  TraceSet tr = traces_for(cfg);
  CsvBuilder csv;
  csv.row({"n", "b", "db_du", "db_dt", "d2b_dudt"});
  for (int n = 1; n <= tr.n_max; ++n)
    csv.row({std::to_string(n), fmt17(tr.b[n]), fmt17(tr.db_du[n]),
             fmt17(tr.db_dt[n]), fmt17(tr.d2b_dudt[n])});
  emit(cfg.out, csv.str());
  return 0;
}

int cmd_coeffs(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  TraceSet tr = traces_for(cfg);
  DetSeries<double> s = series_for(cfg, tr);
  CsvBuilder csv;
  csv.row({"n", "a", "da_du", "da_dt", "d2a_dudt"});
  for (int n = 0; n <= s.n_max; ++n)
    csv.row({std::to_string(n), fmt17(s.a[n]), fmt17(s.da_du[n]),
             fmt17(s.da_dt[n]), fmt17(s.d2a_dudt[n])});
  emit(cfg.out, csv.str());

  if (cfg.fit) {
    linresp::DecayMode mode = cfg.model == ModelKind::circle
                                  ? linresp::DecayMode::circle
                                  : linresp::DecayMode::torus;
    json j;
    try {
      linresp::DecayFit fit = linresp::decay_fit(s, mode);
      j = {{"mode", cfg.model == ModelKind::circle ? "circle" : "torus"},
           {"theta", fit.theta},
           {"beta", fit.beta},
           {"r2", fit.r2},
           {"floor_n", fit.floor_n},
           {"npts", fit.npts}};
    } catch (const std::exception& e) {
      j = {{"mode", cfg.model == ModelKind::circle ? "circle" : "torus"},
           {"error", e.what()}};
    }
    std::string text = j.dump(2) + "\n";
    if (cfg.out.empty())
      std::cout << text;
    else
      linresp::write_text_file(cfg.out + ".fit.json", text);
  }
  return 0;
}

json response_json(const ExperimentConfig& cfg, TraceSet* tr_out = nullptr) {
  WeightSign w = cfg.model == ModelKind::circle ? WeightSign::minus_ug
                                                : WeightSign::plus_vg;
  TraceSet tr = traces_for(cfg);
  if (tr_out) *tr_out = tr;
  DetSeries<double> s = series_for(cfg, tr);
  linresp::ResponseReport rep = linresp::assemble_report(s, tr, w);

  // Abel tail diagnostic wants a centered observable: shift g by the
  // computed mean and rerun the trace pipeline on the shifted weight.
  ExperimentConfig centered = cfg;
  if (cfg.model == ModelKind::circle)
    centered.g.c0 -= rep.mean;
  else
    centered.g2.c0 -= rep.mean;
  json abel_json = nullptr;
  try {
    TraceSet trc = traces_for(centered);
    DetSeries<double> sc = series_for(centered, trc);
    double mean_c = linresp::mean_observable(sc, w);
    linresp::AbelDiagnostic abel = linresp::abel_diagnostic(trc, w, mean_c);
    abel_json = {{"estimate", abel.estimate}, {"indicator", abel.indicator}};
  } catch (const std::exception&) {
    // n_max too small or centering failed: report the slot as absent.
  }

  json j;
  j["model"] = cfg.model == ModelKind::circle ? "circle" : "torus";
  j["n_max"] = cfg.n_max;
  j["scalar"] = cfg.scalar == ScalarKind::extended ? "extended" : "binary64";
  j["mean"] = rep.mean;
  j["response"] = rep.response;
  j["response_alt"] = rep.response_alt;
  j["abel"] = abel_json;
  j["truncation_n"] = rep.truncation_n;
  j["tail_indicator"] = rep.tail_indicator;
  return j;
}

int cmd_response(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  require_model(cfg, ModelKind::circle, "response");
  emit(cfg.out, response_json(cfg).dump(2) + "\n");
  return 0;
}

int cmd_anosov_response(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  require_model(cfg, ModelKind::torus, "anosov-response");
  TraceSet tr;
  emit(cfg.out, response_json(cfg, &tr).dump(2) + "\n");

  // Companion artifact: the per-n traces behind the report.
  CsvBuilder csv;
  csv.row({"n", "b", "db_du", "db_dt", "d2b_dudt"});
  for (int n = 1; n <= tr.n_max; ++n)
    csv.row({std::to_string(n), fmt17(tr.b[n]), fmt17(tr.db_du[n]),
             fmt17(tr.db_dt[n]), fmt17(tr.d2b_dudt[n])});
  if (cfg.out.empty())
    std::cout << csv.str();
  else
    linresp::write_text_file(cfg.out + ".traces.csv", csv.str());
  return 0;
}

std::string self_path() {
  if (const char* env = std::getenv("LINRESP_CLI")) return env;
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof buf - 1);
  if (n <= 0) return "";
  buf[n] = '\0';
  return buf;
}

int cmd_validate(const CommonArgs& args, const std::string& config_dir_flag) {
  // validate pins its own experiment families; only run parameters are read.
  int threads = 1;
  if (args.threads_opt && args.threads_opt->count()) threads = args.threads;
  else if (const char* s = std::getenv("LINRESP_THREADS")) threads = std::atoi(s);
  if (threads < 1 || threads > 256)
    throw std::runtime_error("--threads out of range [1, 256]");

  linresp::CheckContext ctx;
  ctx.threads = threads;
  ctx.cli_path = self_path();
  ctx.config_dir = config_dir_flag;
  if (ctx.config_dir.empty())
    if (const char* env = std::getenv("LINRESP_CONFIG_DIR")) ctx.config_dir = env;
  if (ctx.config_dir.empty()) ctx.config_dir = "configs";

  std::vector<linresp::CheckResult> results = linresp::run_standard_checks(ctx);

  json checks = json::array();
  for (const auto& r : results) {
    std::printf("[%s] %s %s (%.2fs): %s\n", r.pass ? "PASS" : "FAIL",
                r.id.c_str(), r.name.c_str(), r.seconds, r.detail.c_str());
    checks.push_back(
        {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  bool ok = linresp::all_pass(results);
  std::printf("%s\n", ok ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT");

  std::string out = args.out_opt && args.out_opt->count() ? args.out : "";
  if (out.empty())
    if (const char* env = std::getenv("LINRESP_OUT")) out = env;
  if (!out.empty()) {
    json j = {{"checks", checks}, {"all_pass", ok}};
    linresp::write_text_file(out, j.dump(2) + "\n");
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Linear response of analytic expanding circle maps and perturbed "
      "hyperbolic toral automorphisms from periodic-point data"};
  app.require_subcommand(1);

  CommonArgs a_orbits, a_traces, a_coeffs, a_resp, a_anosov, a_validate;
  std::string config_dir_flag;

  CLI::App* sub_orbits =
      app.add_subcommand("dump-orbits", "periodic orbit data as CSV");
  attach_common(sub_orbits, a_orbits, false);
  CLI::App* sub_traces =
      app.add_subcommand("traces", "weighted trace sums b_n and derivatives");
  attach_common(sub_traces, a_traces, false);
  CLI::App* sub_coeffs =
      app.add_subcommand("coeffs", "determinant coefficients a_n and derivatives");
  attach_common(sub_coeffs, a_coeffs, true);
  CLI::App* sub_resp =
      app.add_subcommand("response", "mean and linear response (circle)");
  attach_common(sub_resp, a_resp, false);
  CLI::App* sub_anosov =
      app.add_subcommand("anosov-response", "mean and linear response (torus)");
  attach_common(sub_anosov, a_anosov, false);
  CLI::App* sub_validate =
      app.add_subcommand("validate", "run the full cross-check suite");
  attach_common(sub_validate, a_validate, false);
  sub_validate->add_option("--config-dir", config_dir_flag,
                           "directory with probe configs (default: configs)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sub_orbits->parsed()) return cmd_dump_orbits(a_orbits);
    if (sub_traces->parsed()) return cmd_traces(a_traces);
    if (sub_coeffs->parsed()) return cmd_coeffs(a_coeffs);
    if (sub_resp->parsed()) return cmd_response(a_resp);
    if (sub_anosov->parsed()) return cmd_anosov_response(a_anosov);
    if (sub_validate->parsed()) return cmd_validate(a_validate, config_dir_flag);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
