#include "pnpns/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "pnpns/norms.hpp"
#include "pnpns/operators.hpp"

namespace pnpns {

namespace {

// p - n with its (round-off sized) mean removed, after checking the species
// carry the same mass.
CellField charge_density(const SchemeState& state, const char* where) {
  CellField q = state.p_curr - state.n_curr;
  const double m = mean(q);
  if (std::abs(m) > 1e-10) {
    std::ostringstream os;
    os << where << ": species means differ by " << m;
    throw PreconditionError(os.str());
  }
  q.array() -= m;
  return q;
}

}  // namespace

EnergyBreakdown energies(const SchemeState& state, double tau, const PoissonContext& ctx) {
  if (!(state.n_curr.min() > 0.0) || !(state.p_curr.min() > 0.0))
    throw DomainError("energies: concentrations must be positive");
  const GridSpec& g = state.grid();
  const CellField entropy(g, state.n_curr.array() * (state.n_curr.array().log() - 1.0) +
                                 state.p_curr.array() * (state.p_curr.array().log() - 1.0));
  EnergyBreakdown e;
  e.entropy_part = mean(entropy) * g.area();
  const double nm1 = norm_minus1(ctx, charge_density(state, "energies"));
  e.potential_part = 0.5 * nm1 * nm1;
  e.kinetic_part = 0.5 * ip_vec(state.u_curr, state.u_curr);
  const MacVelocity gp = grad_mac(state.psi_curr);
  e.pressure_correction = tau * tau / 8.0 * ip_vec(gp, gp);
  e.e_h = e.entropy_part + e.potential_part;
  e.e_total = e.e_h + e.kinetic_part;
  e.e_modified = e.e_total + e.pressure_correction;
  return e;
}

CellField electric_potential(const SchemeState& state, const PoissonContext& ctx) {
  return inv_neg_laplace(ctx, charge_density(state, "electric_potential"));
}

MinConcentration min_concentration(const SchemeState& state) {
  MinConcentration m;
  m.n = state.n_curr.min();
  m.p = state.p_curr.min();
  m.both = std::min(m.n, m.p);
  return m;
}

TimeSeriesRow make_row(const SchemeState& state, double tau, const PoissonContext& ctx, int iters) {
  const EnergyBreakdown e = energies(state, tau, ctx);
  TimeSeriesRow r;
  r.step = state.step_index;
  r.time = state.time;
  r.e_h = e.e_h;
  r.e_total = e.e_total;
  r.e_modified = e.e_modified;
  r.mass_n = mean(state.n_curr);
  r.mass_p = mean(state.p_curr);
  r.min_n = state.n_curr.min();
  r.min_p = state.p_curr.min();
  r.div_u_inf = norm_inf(div_mac(state.u_curr));
  r.nonlinear_iters = iters;
  return r;
}

}  // namespace pnpns
