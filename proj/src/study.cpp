#include "pnpns/study.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "pnpns/io.hpp"
#include "pnpns/norms.hpp"
#include "pnpns/operators.hpp"
#include "pnpns/transfer.hpp"

namespace pnpns {

namespace fs = std::filesystem;

SchemeParams make_params(const RunConfig& cfg) {
  SchemeParams p;
  p.grid = GridSpec::centered(cfg.n_cells, cfg.length);
  p.tau = cfg.time_step();
  p.t_final = cfg.t_final;
  p.iter_tol = cfg.iter_tol;
  p.max_nonlinear_iters = cfg.max_nonlinear_iters;
  return p;
}

SchemeState make_initial_state(const RunConfig& cfg, const PoissonContext& ctx) {
  const GridSpec& g = ctx.grid();
  if (cfg.initial_condition == "paper") return init_from_functions(g, paper_initial_data(), ctx);
  if (cfg.initial_condition == "uniform") return init_from_functions(g, uniform_initial_data(), ctx);
  io::InitialFields f = io::read_initial_fields(cfg.initial_condition.substr(5), g);
  if (!(f.p.min() > 0.0) || !(f.n.min() > 0.0))
    throw ConfigError("initial condition file: concentrations must be positive");
  return init_from_fields(std::move(f.p), std::move(f.n), std::move(f.u), std::move(f.psi), ctx);
}

std::optional<std::string> check_invariants(const TimeSeriesRow& prev, const TimeSeriesRow& row,
                                            const TimeSeriesRow& initial, const SchemeState& state) {
  std::ostringstream os;
  os << std::setprecision(6);
  if (!(row.min_n > 0.0) || !(row.min_p > 0.0)) {
    os << "positivity lost at step " << row.step << " (min_n " << row.min_n << ", min_p " << row.min_p << ")";
    return os.str();
  }
  const double drift = std::max(std::abs(row.mass_n - initial.mass_n), std::abs(row.mass_p - initial.mass_p));
  if (drift > 1e-10) {
    os << "mass drift " << drift << " at step " << row.step;
    return os.str();
  }
  const double h = state.grid().h();
  const double div_bound = 1e-9 * std::max(1.0, norm_inf(state.u_curr) / h);
  if (row.div_u_inf > div_bound) {
    os << "divergence " << row.div_u_inf << " exceeds " << div_bound << " at step " << row.step;
    return os.str();
  }
  if (row.e_modified > prev.e_modified + 1e-8) {
    os << "modified energy increased by " << row.e_modified - prev.e_modified << " at step " << row.step;
    return os.str();
  }
  return std::nullopt;
}

namespace {

void write_summary(const fs::path& path, const RunConfig& cfg, const RunResult& r) {
  nlohmann::json j;
  j["n_cells"] = cfg.n_cells;
  j["tau"] = cfg.time_step();
  j["steps"] = r.rows.empty() ? 0 : r.rows.back().step;
  j["exit_code"] = r.exit_code;
  j["message"] = r.message;
  if (!r.rows.empty()) {
    const auto& first = r.rows.front();
    const auto& last = r.rows.back();
    j["final_time"] = last.time;
    j["final_mass_n"] = last.mass_n;
    j["final_mass_p"] = last.mass_p;
    double min_n = first.min_n, min_p = first.min_p;
    for (const auto& row : r.rows) {
      min_n = std::min(min_n, row.min_n);
      min_p = std::min(min_p, row.min_p);
    }
    j["min_n"] = min_n;
    j["min_p"] = min_p;
    j["e_total_initial"] = first.e_total;
    j["e_total_final"] = last.e_total;
    j["e_modified_initial"] = first.e_modified;
    j["e_modified_final"] = last.e_modified;
  }
  j["damping_events"] = r.damping_events;
  j["krylov_iters_total"] = r.krylov_iters_total;
  if (r.failed_step) {
    j["failed_step"] = {{"nonlinear_iters", r.failed_step->nonlinear_iters},
                        {"final_update_norm", r.failed_step->final_update_norm},
                        {"min_n", r.failed_step->min_n},
                        {"min_p", r.failed_step->min_p}};
  }
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

}  // namespace

RunResult run(const RunConfig& cfg_in, bool write_artifacts) {
  RunResult result;
  RunConfig cfg = cfg_in;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    result.exit_code = kExitConfig;
    result.message = e.what();
    return result;
  }

  const SchemeParams params = make_params(cfg);
  const PoissonContext ctx(params.grid);
  const fs::path out_dir = cfg.output_dir;
  std::ofstream ts;

  SchemeState state;
  try {
    state = make_initial_state(cfg, ctx);
  } catch (const Error& e) {
    result.exit_code = kExitConfig;
    result.message = e.what();
    return result;
  }

  if (write_artifacts) {
    fs::create_directories(out_dir);
    ts.open(out_dir / "timeseries.csv");
    io::write_timeseries_header(ts);
  }
  auto record = [&](const TimeSeriesRow& row) {
    result.rows.push_back(row);
    if (write_artifacts) io::write_timeseries_row(ts, row);
    if (write_artifacts && cfg.snapshot_every > 0 && row.step % cfg.snapshot_every == 0)
      io::write_snapshot(out_dir / "snapshots", state);
  };
  record(make_row(state, params.tau, ctx, 0));

  const int steps = cfg.step_count();
  for (int k = 0; k < steps; ++k) {
    try {
      const bool first_order = (k == 0) || cfg.debug_first_order;
      auto [next, report] = first_order ? bootstrap_first_step(state, params, ctx) : step(state, params, ctx);
      state = std::move(next);
      result.damping_events += report.damping_events;
      result.krylov_iters_total += report.krylov_iters_total;
      record(make_row(state, params.tau, ctx, report.nonlinear_iters));
    } catch (const StepError& e) {
      result.exit_code = kExitSolver;
      result.message = "step " + std::to_string(k + 1) + ": " + e.what();
      result.failed_step = e.report();
      break;
    } catch (const Error& e) {
      result.exit_code = kExitSolver;
      result.message = "step " + std::to_string(k + 1) + ": " + e.what();
      break;
    }
    const auto& rows = result.rows;
    if (auto violation = check_invariants(rows[rows.size() - 2], rows.back(), rows.front(), state)) {
      result.exit_code = kExitInvariant;
      result.message = *violation;
      break;
    }
  }
  result.final_state = state;
  if (write_artifacts) write_summary(out_dir / "summary.json", cfg, result);
  return result;
}

double observed_order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

namespace {

template <typename Scalar, Location Loc>
std::pair<double, double> cauchy_errors(const Field<Scalar, Loc>& coarse, const Field<Scalar, Loc>& fine_restricted) {
  const Field<Scalar, Loc> diff = coarse - fine_restricted;
  return {norm_l2(diff), norm_inf(diff)};
}

void write_table_csv(const fs::path& path, const ConvergenceTable& t) {
  std::ofstream out(path);
  out << "h,err_l2,order_l2,err_linf,order_linf\n";
  auto order = [](double v) { return std::isnan(v) ? std::string() : io::format_double(v); };
  for (const auto& r : t.rows)
    out << io::format_double(r.h) << ',' << io::format_double(r.err_l2) << ',' << order(r.order_l2) << ','
        << io::format_double(r.err_linf) << ',' << order(r.order_linf) << '\n';
}

}  // namespace

std::string render_tables(const std::vector<ConvergenceTable>& tables) {
  std::ostringstream os;
  os << "# Cauchy errors ||z_h - R z_{h/2}|| evaluated on the coarse grid h\n";
  for (const auto& t : tables) {
    os << "\n[" << t.variable << "]\n";
    os << std::setw(12) << "h" << std::setw(14) << "err_l2" << std::setw(8) << "order" << std::setw(14)
       << "err_linf" << std::setw(8) << "order" << '\n';
    for (const auto& r : t.rows) {
      os << std::setw(12) << std::setprecision(5) << r.h << std::scientific << std::setprecision(4)
         << std::setw(14) << r.err_l2 << std::fixed << std::setprecision(2) << std::setw(8);
      if (std::isnan(r.order_l2))
        os << "--";
      else
        os << r.order_l2;
      os << std::scientific << std::setprecision(4) << std::setw(14) << r.err_linf << std::fixed
         << std::setprecision(2) << std::setw(8);
      if (std::isnan(r.order_linf))
        os << "--";
      else
        os << r.order_linf;
      os << std::defaultfloat << '\n';
    }
  }
  return os.str();
}

ConvergenceStudy converge(const RunConfig& cfg, const std::vector<int>& n_list, bool write_artifacts) {
  ConvergenceStudy study;
  if (n_list.empty()) {
    study.exit_code = kExitConfig;
    study.message = "converge: empty resolution list";
    return study;
  }
  for (std::size_t k = 1; k < n_list.size(); ++k)
    if (n_list[k] != 2 * n_list[k - 1]) {
      study.exit_code = kExitConfig;
      study.message = "converge: each resolution must double the previous one";
      return study;
    }

  const fs::path out_dir = cfg.output_dir;
  std::vector<std::future<RunResult>> jobs;
  for (int n : n_list) {
    RunConfig c = cfg;
    c.n_cells = n;
    c.output_dir = (out_dir / ("run_N" + std::to_string(n))).string();
    jobs.push_back(std::async(std::launch::async, [c, write_artifacts] { return run(c, write_artifacts); }));
  }
  for (auto& j : jobs) study.runs.push_back(j.get());
  for (const auto& r : study.runs)
    if (r.exit_code != kExitOk) {
      study.exit_code = r.exit_code;
      study.message = "converge: run failed: " + r.message;
      return study;
    }

  const std::vector<std::string> names = {"p", "n", "phi", "u", "v", "psi"};
  for (const auto& name : names) study.tables.push_back({name, {}});

  for (std::size_t k = 0; k + 1 < study.runs.size(); ++k) {
    const SchemeState& coarse = *study.runs[k].final_state;
    const SchemeState& fine = *study.runs[k + 1].final_state;
    const PoissonContext coarse_ctx(coarse.grid());
    const PoissonContext fine_ctx(fine.grid());
    const CellField phi_coarse = electric_potential(coarse, coarse_ctx);
    const CellField phi_fine = restrict_cell(electric_potential(fine, fine_ctx));
    const MacVelocity u_fine = restrict_mac(fine.u_curr);

    const std::pair<double, double> errs[] = {
        cauchy_errors(coarse.p_curr, restrict_cell(fine.p_curr)),
        cauchy_errors(coarse.n_curr, restrict_cell(fine.n_curr)),
        cauchy_errors(phi_coarse, phi_fine),
        cauchy_errors(coarse.u_curr.x, u_fine.x),
        cauchy_errors(coarse.u_curr.y, u_fine.y),
        cauchy_errors(coarse.psi_curr, restrict_cell(fine.psi_curr)),
    };
    for (std::size_t v = 0; v < names.size(); ++v) {
      auto& rows = study.tables[v].rows;
      ConvergenceRow row{coarse.grid().h(), errs[v].first, std::numeric_limits<double>::quiet_NaN(),
                         errs[v].second, std::numeric_limits<double>::quiet_NaN()};
      if (!rows.empty()) {
        row.order_l2 = observed_order(rows.back().err_l2, row.err_l2);
        row.order_linf = observed_order(rows.back().err_linf, row.err_linf);
      }
      rows.push_back(row);
    }
  }

  if (write_artifacts) {
    fs::create_directories(out_dir);
    for (const auto& t : study.tables) write_table_csv(out_dir / ("convergence_" + t.variable + ".csv"), t);
    std::ofstream(out_dir / "convergence.txt") << render_tables(study.tables);
  }
  return study;
}

}  // namespace pnpns
