#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spde_lab/drift_operators.hpp"
#include "spde_lab/integrator.hpp"
#include "spde_lab/noise.hpp"

namespace spde_lab {

/// Validated run configuration. JSON layout:
///   equation:   kind ("p_laplace" | "fast_diffusion"), p | r, epsilon (1e-8)
///   grid:       n (31)
///   integrator: dt (1e-3), newton_tol (1e-10), newton_max_iter (50)
///   noise:      sigma (0.1), q (1.0), k_modes (16), seed (0)
///   experiment: report, time_grid, n_paths (200), T, starts ([[], [2.0]]),
///               snapshot_stride (0.1)
/// Only equation.kind and its exponent are required. Absent time_grid and T
/// take per-subcommand defaults. Each start lists eigenmode coefficients.
struct Config {
    DriftSpec drift = DriftSpec::p_laplace(1.5);
    std::size_t n = 31;
    IntegratorConfig integrator;
    NoiseSpec noise;
    std::optional<std::string> report;
    std::optional<std::vector<double>> time_grid;
    std::size_t n_paths = 200;
    std::optional<double> T;
    std::vector<std::vector<double>> starts{{}, {2.0}};
    double snapshot_stride = 0.1;
};

/// Parses and validates JSON text. Unknown keys, wrong types and violated
/// constraints raise ConfigError naming the key or constraint.
Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);

/// start index -> Field on the configured grid.
Field config_start(const Config& config, std::size_t index);

/// Runs one subcommand; returns 0 (all criteria pass), 1 (a hard criterion
/// fails), 2 (configuration or I/O error) or 3 (solver failure).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spde_lab
