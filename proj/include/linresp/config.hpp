#pragma once

#include <cstdint>
#include <string>

#include "linresp/anosov.hpp"
#include "linresp/circle_map.hpp"
#include "linresp/toml_lite.hpp"
#include "linresp/trig_poly.hpp"

namespace linresp {

enum class ModelKind { circle, torus };
enum class ScalarKind { binary64, extended };

struct GalerkinParams {
  int modes = 64;        // Fourier cutoff M, matrix is (2M+1)^2
  int quadrature = 4096; // trapezoid points K
};

struct FdParams {
  double step = 1e-3;  // parameter step for finite-difference oracles
};

struct BirkhoffParams {
  std::uint64_t iters = 100000000;  // per parameter value
  std::uint64_t burn_in = 100000;
  int batches = 32;
  std::uint64_t seed = 20240816;
};

// One experiment: a map family, an observable, and run parameters.
// Populated from a TOML file; selected entries can then be overridden by
// environment variables and command-line flags (flags win).
struct ExperimentConfig {
  ModelKind model = ModelKind::circle;

  CircleMapFamily circle;
  TrigPoly g;  // circle observable

  TorusMapFamily torus;
  TrigPoly2 g2;  // torus observable

  int n_max = 12;
  int threads = 1;
  ScalarKind scalar = ScalarKind::binary64;
  std::string out;  // output path; empty = stdout
  bool fit = false; // append coefficient-decay fit report

  GalerkinParams galerkin;
  FdParams fd;
  BirkhoffParams birkhoff;
};

// Build from parsed TOML.  Throws std::runtime_error naming the offending
// field ("missing config field 'map.degree'", bad counts, non-finite values).
ExperimentConfig config_from_table(const toml::Table& tab);
ExperimentConfig load_config(const std::string& path);

// Apply LINRESP_NMAX / LINRESP_THREADS / LINRESP_OUT / LINRESP_SEED /
// LINRESP_FIT on top of file values.  Malformed numbers throw.
void apply_env_overrides(ExperimentConfig& cfg);

}  // namespace linresp
