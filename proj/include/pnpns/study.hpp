#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pnpns/config.hpp"
#include "pnpns/diagnostics.hpp"
#include "pnpns/scheme.hpp"

namespace pnpns {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitInvariant = 4 };

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<TimeSeriesRow> rows;  ///< initial state first, then one per step
  std::optional<SchemeState> final_state;
  std::optional<StepReport> failed_step;
  int damping_events = 0;
  long krylov_iters_total = 0;
};

SchemeParams make_params(const RunConfig& cfg);

/// Level-0 state for the configured initial condition.
SchemeState make_initial_state(const RunConfig& cfg, const PoissonContext& ctx);

/// Post-step invariant check against the previous row. Returns a
/// description of the first violated invariant, if any.
std::optional<std::string> check_invariants(const TimeSeriesRow& prev, const TimeSeriesRow& row,
                                            const TimeSeriesRow& initial, const SchemeState& state);

/// Runs the configured simulation. With write_artifacts, writes
/// timeseries.csv, summary.json and snapshots into cfg.output_dir.
RunResult run(const RunConfig& cfg, bool write_artifacts = true);

struct ConvergenceRow {
  double h = 0.0;
  double err_l2 = 0.0, order_l2 = 0.0;      ///< order is NaN on the first row
  double err_linf = 0.0, order_linf = 0.0;
};

struct ConvergenceTable {
  std::string variable;  ///< p, n, phi, u, v or psi
  std::vector<ConvergenceRow> rows;
};

struct ConvergenceStudy {
  int exit_code = kExitOk;
  std::string message;
  std::vector<ConvergenceTable> tables;
  std::vector<RunResult> runs;
};

/// Cauchy-error study: runs every resolution in n_list (each double the
/// previous) and compares each adjacent pair on the coarse grid after
/// restricting the fine solution.
ConvergenceStudy converge(const RunConfig& cfg, const std::vector<int>& n_list,
                          bool write_artifacts = true);

/// log2(e_coarse / e_fine).
double observed_order(double e_coarse, double e_fine);

std::string render_tables(const std::vector<ConvergenceTable>& tables);

}  // namespace pnpns
