#pragma once

#include <optional>
#include <string>

namespace pnpns {

/// Settings for one simulation run, read from a flat `key = value` file.
///
/// Recognized keys: n_cells, length, tau_ratio, tau, t_final,
/// initial_condition ("paper" | "uniform" | "file:<path>"), iter_tol,
/// max_nonlinear_iters, output_dir, snapshot_every, debug_first_order.
struct RunConfig {
  int n_cells = 0;
  double length = 4.0;
  std::optional<double> tau_ratio;  ///< tau = tau_ratio * h
  std::optional<double> tau;
  double t_final = 0.0;
  std::string initial_condition = "paper";
  double iter_tol = 1e-10;
  int max_nonlinear_iters = 100;
  std::string output_dir = "out";
  int snapshot_every = 0;
  bool debug_first_order = false;  ///< duplicate history on every step

  double h() const { return length / n_cells; }
  double time_step() const { return tau ? *tau : *tau_ratio * h(); }
  int step_count() const;

  /// Fills defaults and checks invariants; throws ConfigError.
  void validate();
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

}  // namespace pnpns
