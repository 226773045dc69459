#include "linresp/config.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace linresp {

namespace {

void require_finite(const std::vector<double>& v, const std::string& key) {
  for (double x : v)
    if (!std::isfinite(x))
      throw std::runtime_error("config field '" + key + "' has a non-finite entry");
}

std::vector<double> opt_double_array(const toml::Table& tab, const std::string& key) {
  if (!tab.has(key)) return {};
  auto v = tab.at(key).as_double_array();
  require_finite(v, key);
  return v;
}

TrigPoly load_trig(const toml::Table& tab, const std::string& prefix) {
  TrigPoly p(tab.get_double(prefix + "_const", 0.0),
             opt_double_array(tab, prefix + "_cos"),
             opt_double_array(tab, prefix + "_sin"));
  return p;
}

TrigPoly2 load_trig2(const toml::Table& tab, const std::string& prefix) {
  TrigPoly2 p;
  p.c0 = tab.get_double(prefix + "_const", 0.0);
  if (!tab.has(prefix + "_terms")) return p;
  const auto& rows = tab.at(prefix + "_terms").as_array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto row = rows[r].as_double_array();
    const std::string where =
        "config field '" + prefix + "_terms' row " + std::to_string(r + 1);
    if (row.size() != 4)
      throw std::runtime_error(where + " must be [k1, k2, cos_amp, sin_amp]");
    require_finite(row, prefix + "_terms");
    double k1 = row[0], k2 = row[1];
    if (k1 != std::floor(k1) || k2 != std::floor(k2))
      throw std::runtime_error(where + " has non-integer frequencies");
    TrigTerm2 term;
    term.k1 = static_cast<std::int64_t>(k1);
    term.k2 = static_cast<std::int64_t>(k2);
    term.ca = row[2];
    term.sa = row[3];
    p.terms.push_back(term);
  }
  return p;
}

int checked_int(const toml::Table& tab, const std::string& key, std::int64_t dflt,
                std::int64_t lo, std::int64_t hi) {
  std::int64_t v = tab.get_int(key, dflt);
  if (v < lo || v > hi)
    throw std::runtime_error("config field '" + key + "' out of range [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::uint64_t checked_u64(const toml::Table& tab, const std::string& key,
                          std::uint64_t dflt) {
  if (!tab.has(key)) return dflt;
  std::int64_t v = tab.at(key).as_int();
  if (v < 0)
    throw std::runtime_error("config field '" + key + "' must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

ExperimentConfig config_from_table(const toml::Table& tab) {
  ExperimentConfig cfg;

  std::string model = tab.get_string("model", "circle");
  if (model == "circle")
    cfg.model = ModelKind::circle;
  else if (model == "torus")
    cfg.model = ModelKind::torus;
  else
    throw std::runtime_error("config field 'model' must be \"circle\" or \"torus\"");

  if (cfg.model == ModelKind::circle) {
    // map.degree is mandatory: a circle family without its linear part is
    // meaningless, so its absence must fail loudly by name.
    cfg.circle.degree = static_cast<int>(tab.at("map.degree").as_int());
    if (cfg.circle.degree < 2)
      throw std::runtime_error("config field 'map.degree' must be >= 2");
    cfg.circle.p0 = load_trig(tab, "map.p0");
    cfg.circle.X = load_trig(tab, "map.x");
    cfg.circle.t_max = tab.get_double("map.t_max", cfg.circle.t_max);
    if (!(cfg.circle.t_max >= 0.0))
      throw std::runtime_error("config field 'map.t_max' must be >= 0");
    cfg.g = load_trig(tab, "observable.g");
  } else {
    if (!tab.has("map.a"))
      throw std::runtime_error("missing config field 'map.a'");
    auto a = tab.at("map.a").as_double_array();
    if (a.size() != 4)
      throw std::runtime_error("config field 'map.a' must be [a11, a12, a21, a22]");
    for (double e : a)
      if (e != std::floor(e))
        throw std::runtime_error("config field 'map.a' must be integer");
    cfg.torus.A = Mat2l{static_cast<std::int64_t>(a[0]), static_cast<std::int64_t>(a[1]),
                        static_cast<std::int64_t>(a[2]), static_cast<std::int64_t>(a[3])};
    cfg.torus.P1 = load_trig2(tab, "map.p1");
    cfg.torus.P2 = load_trig2(tab, "map.p2");
    cfg.torus.t_max = tab.get_double("map.t_max", cfg.torus.t_max);
    if (!(cfg.torus.t_max >= 0.0))
      throw std::runtime_error("config field 'map.t_max' must be >= 0");
    cfg.g2 = load_trig2(tab, "observable.g2");
  }

  cfg.n_max = checked_int(tab, "run.n_max", cfg.n_max, 1, 64);
  cfg.threads = checked_int(tab, "run.threads", cfg.threads, 1, 256);
  cfg.out = tab.get_string("run.out", "");
  cfg.fit = tab.get_bool("run.fit", false);

  std::string scalar = tab.get_string("run.scalar", "binary64");
  if (scalar == "binary64")
    cfg.scalar = ScalarKind::binary64;
  else if (scalar == "extended")
    cfg.scalar = ScalarKind::extended;
  else
    throw std::runtime_error(
        "config field 'run.scalar' must be \"binary64\" or \"extended\"");

  cfg.galerkin.modes = checked_int(tab, "galerkin.modes", cfg.galerkin.modes, 1, 4096);
  cfg.galerkin.quadrature =
      checked_int(tab, "galerkin.quadrature", cfg.galerkin.quadrature, 8, 1 << 22);

  cfg.fd.step = tab.get_double("fd.step", cfg.fd.step);
  if (!(cfg.fd.step > 0.0) || !std::isfinite(cfg.fd.step))
    throw std::runtime_error("config field 'fd.step' must be positive");

  cfg.birkhoff.iters = checked_u64(tab, "birkhoff.iters", cfg.birkhoff.iters);
  cfg.birkhoff.burn_in = checked_u64(tab, "birkhoff.burn_in", cfg.birkhoff.burn_in);
  cfg.birkhoff.batches =
      checked_int(tab, "birkhoff.batches", cfg.birkhoff.batches, 2, 4096);
  cfg.birkhoff.seed = checked_u64(tab, "birkhoff.seed", cfg.birkhoff.seed);

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_table(toml::parse_file(path));
}

namespace {

const char* env(const char* name) { return std::getenv(name); }

std::int64_t env_int(const char* name, const char* text) {
  char* end = nullptr;
  long long v = std::strtoll(text, &end, 10);
  if (end == text || *end != '\0')
    throw std::runtime_error(std::string("environment override ") + name +
                             " is not an integer: '" + text + "'");
  return v;
}

}  // namespace

void apply_env_overrides(ExperimentConfig& cfg) {
  if (const char* s = env("LINRESP_NMAX")) {
    std::int64_t v = env_int("LINRESP_NMAX", s);
    if (v < 1 || v > 64) throw std::runtime_error("LINRESP_NMAX out of range [1, 64]");
    cfg.n_max = static_cast<int>(v);
  }
  if (const char* s = env("LINRESP_THREADS")) {
    std::int64_t v = env_int("LINRESP_THREADS", s);
    if (v < 1 || v > 256)
      throw std::runtime_error("LINRESP_THREADS out of range [1, 256]");
    cfg.threads = static_cast<int>(v);
  }
  if (const char* s = env("LINRESP_OUT")) cfg.out = s;
  if (const char* s = env("LINRESP_SEED"))
    cfg.birkhoff.seed = static_cast<std::uint64_t>(env_int("LINRESP_SEED", s));
  if (const char* s = env("LINRESP_FIT")) {
    std::string v = s;
    if (v == "1" || v == "true")
      cfg.fit = true;
    else if (v == "0" || v == "false")
      cfg.fit = false;
    else
      throw std::runtime_error("LINRESP_FIT must be 0/1/true/false");
  }
}

}  // namespace linresp
