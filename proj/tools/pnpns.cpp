// pnpns: run the PNP-Navier-Stokes MAC scheme or a Cauchy convergence study.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnpns/config.hpp"
#include "pnpns/errors.hpp"
#include "pnpns/study.hpp"

namespace {

std::vector<int> parse_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw pnpns::ConfigError("--n: bad entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positivity-preserving, energy-stable PNP-Navier-Stokes solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir, n_list = "32,64,128";
  int snapshot_every = -1;
  bool first_order = false;

  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_cmd->add_option("--config", config_path, "Configuration file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run_cmd->add_option("--snapshot-every", snapshot_every, "Write field snapshots every K steps");
  run_cmd->add_flag("--debug-first-order", first_order, "Duplicate history on every step");

  auto* conv_cmd = app.add_subcommand("converge", "Cauchy-error convergence study");
  conv_cmd->add_option("--config", config_path, "Configuration file")->required();
  conv_cmd->add_option("--n", n_list, "Comma-separated resolutions, each double the previous");
  conv_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  conv_cmd->add_option("--snapshot-every", snapshot_every, "Write field snapshots every K steps");
  conv_cmd->add_flag("--debug-first-order", first_order, "Duplicate history on every step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pnpns::kExitConfig;
  }

  pnpns::RunConfig cfg;
  std::vector<int> resolutions;
  try {
    cfg = pnpns::parse_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (snapshot_every >= 0) cfg.snapshot_every = snapshot_every;
    if (first_order) cfg.debug_first_order = true;
    cfg.validate();
    if (conv_cmd->parsed()) resolutions = parse_list(n_list);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return pnpns::kExitConfig;
  }

  if (run_cmd->parsed()) {
    const pnpns::RunResult r = pnpns::run(cfg);
    if (r.exit_code != pnpns::kExitOk) {
      std::cerr << "run failed: " << r.message << '\n';
      if (r.failed_step)
        std::cerr << "  nonlinear_iters=" << r.failed_step->nonlinear_iters
                  << " final_update_norm=" << r.failed_step->final_update_norm
                  << " min_n=" << r.failed_step->min_n << " min_p=" << r.failed_step->min_p << '\n';
      return r.exit_code;
    }
    const auto& last = r.rows.back();
    std::cout << "steps " << last.step << ", t = " << last.time << ", e_total = " << last.e_total
              << ", min(n,p) = " << std::min(last.min_n, last.min_p) << "\nwrote " << cfg.output_dir
              << "/timeseries.csv\n";
    return 0;
  }

  const pnpns::ConvergenceStudy study = pnpns::converge(cfg, resolutions);
  if (study.exit_code != pnpns::kExitOk) {
    std::cerr << study.message << '\n';
    return study.exit_code;
  }
  std::cout << pnpns::render_tables(study.tables);
  return 0;
}
