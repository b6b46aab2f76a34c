#pragma once

#include <functional>
#include <string>
#include <utility>

#include "pnpns/elliptic.hpp"
#include "pnpns/grid.hpp"
#include "pnpns/krylov.hpp"

namespace pnpns {

struct SchemeParams {
  GridSpec grid;
  double tau = 0.0;
  double t_final = 0.1;
  double iter_tol = 1e-10;      ///< l-inf bound on consecutive iterate changes
  int max_nonlinear_iters = 100;
  double min_damping = 1e-4;    ///< smallest admissible positivity damping factor
  KrylovConfig krylov;

  void validate() const;
};

/// Two-level history needed by the extrapolated scheme.
struct SchemeState {
  CellField n_curr, p_curr;
  CellField n_prev, p_prev;
  MacVelocity u_curr, u_prev;
  CellField psi_curr;  ///< kept mean-zero
  double time = 0.0;
  int step_index = 0;

  const GridSpec& grid() const { return n_curr.grid(); }
};

struct StepReport {
  int nonlinear_iters = 0;
  double final_update_norm = 0.0;
  double min_n = 0.0, min_p = 0.0;
  double div_u_inf = 0.0;
  int damping_events = 0;
  int krylov_iters_total = 0;
};

/// Step failure; carries the diagnostics of the failed step.
class StepError : public Error {
 public:
  StepError(const std::string& what, StepReport report) : Error(what), report_(report) {}
  const StepReport& report() const { return report_; }

 private:
  StepReport report_;
};

/// (3/2) f_curr - (1/2) f_prev.
template <typename T>
T extrapolate_half(const T& f_curr, const T& f_prev) {
  return 1.5 * f_curr - 0.5 * f_prev;
}

/// Edge averages of f_tilde, replaced by sqrt(a^2 + tau^8) where a <= 0.
std::pair<EdgeFieldX, EdgeFieldY> regularized_mobility(const CellField& f_tilde, double tau);

/// F_a(x) = (x ln x - a ln a) / (x - a), with a series branch near x = a.
double f_dif(double a, double x);

/// dF_a/dx, nonnegative.
double f_dif_prime(double a, double x);

/// Modified Crank-Nicolson chemical potential of one species:
/// F_{n_old}(n_new) - 1 + tau ln(n_new/n_old)
///   + (-Delta_h)^{-1}((n_new + n_old)/2 - (other_new + other_old)/2).
CellField chem_potential(const CellField& n_new, const CellField& n_old, const CellField& other_new,
                         const CellField& other_old, double tau, const PoissonContext& ctx);

/// Advances the state by one time step.
std::pair<SchemeState, StepReport> step(const SchemeState& state, const SchemeParams& params,
                                        const PoissonContext& ctx);

/// First step from level-0 data: history is duplicated so the
/// extrapolations collapse onto the current level.
std::pair<SchemeState, StepReport> bootstrap_first_step(const SchemeState& initial,
                                                        const SchemeParams& params,
                                                        const PoissonContext& ctx);

struct InitialData {
  std::function<double(double, double)> p0, n0, u0, v0, psi0;
};

/// The smooth periodic test problem on (-2, 2)^2.
InitialData paper_initial_data();

/// n = p = c, zero velocity and pressure.
InitialData uniform_initial_data(double c = 0.6);

/// Samples the closures on the grid, centers psi and projects u onto the
/// discretely divergence-free space. Both history levels are set to level 0.
SchemeState init_from_functions(const GridSpec& grid, const InitialData& data,
                                const PoissonContext& ctx);

/// Builds a level-0 state from explicit fields (centering psi, projecting u).
SchemeState init_from_fields(CellField p, CellField n, MacVelocity u, CellField psi,
                             const PoissonContext& ctx);

}  // namespace pnpns
