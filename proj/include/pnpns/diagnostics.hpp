#pragma once

#include "pnpns/elliptic.hpp"
#include "pnpns/scheme.hpp"

namespace pnpns {

struct EnergyBreakdown {
  double entropy_part = 0.0;        ///< <n(ln n - 1) + p(ln p - 1), 1>_C
  double potential_part = 0.0;      ///< ||n - p||_{-1,h}^2 / 2
  double kinetic_part = 0.0;        ///< ||u||_2^2 / 2
  double pressure_correction = 0.0; ///< (tau^2 / 8) ||grad_h psi||_2^2
  double e_h = 0.0;
  double e_total = 0.0;
  double e_modified = 0.0;
};

EnergyBreakdown energies(const SchemeState& state, double tau, const PoissonContext& ctx);

/// phi = (-Delta_h)^{-1}(p - n), mean zero.
CellField electric_potential(const SchemeState& state, const PoissonContext& ctx);

struct MinConcentration {
  double n = 0.0, p = 0.0, both = 0.0;
};

MinConcentration min_concentration(const SchemeState& state);

struct TimeSeriesRow {
  int step = 0;
  double time = 0.0;
  double e_h = 0.0, e_total = 0.0, e_modified = 0.0;
  double mass_n = 0.0, mass_p = 0.0;
  double min_n = 0.0, min_p = 0.0;
  double div_u_inf = 0.0;
  int nonlinear_iters = 0;
};

/// Row for the current state; `iters` is the nonlinear count of the step
/// that produced it (0 for the initial state).
TimeSeriesRow make_row(const SchemeState& state, double tau, const PoissonContext& ctx, int iters);

}  // namespace pnpns
