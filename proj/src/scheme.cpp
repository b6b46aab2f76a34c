#include "pnpns/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pnpns/norms.hpp"
#include "pnpns/operators.hpp"

namespace pnpns {

namespace {

constexpr double kCoincidence = 1e-6;

// ln(x/a) = ln(1 + t): log1p near t = 0, the direct quotient elsewhere
// (log1p is ill-conditioned as t -> -1).
double log_ratio(double a, double x, double t) { return std::abs(t) < 0.5 ? std::log1p(t) : std::log(x / a); }

void require_positive(const CellField& f, const char* what) {
  const double m = f.min();
  if (!(m > 0.0)) {
    std::ostringstream os;
    os << what << ": concentration must be positive, min = " << m;
    throw DomainError(os.str());
  }
}

double inf_diff(const MacVelocity& a, const MacVelocity& b) {
  return std::max((a.x.array() - b.x.array()).abs().maxCoeff(),
                  (a.y.array() - b.y.array()).abs().maxCoeff());
}

// Newton-linearized ion update: solve for the next concentration iterate
// with the nonlocal potential and the velocity frozen at the current stage.
IonSolve ion_update(const CellField& c_iter, const CellField& c_curr, const CellField& c_tilde,
                    const EdgeFieldX& mob_x, const EdgeFieldY& mob_y, const CellField& mu,
                    const MacVelocity& u_half, const SchemeParams& params, const PoissonContext& ctx) {
  const GridSpec& g = c_iter.grid();
  const double tau = params.tau;
  CellField d(g);
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      const double x = c_iter.array()(i, j);
      d.array()(i, j) = f_dif_prime(c_curr.array()(i, j), x) + tau / x;
    }
  const CellField lagged(g, mu.array() - d.array() * c_iter.array());
  CellField rhs = (1.0 / tau) * c_curr;
  rhs -= div_mobility(c_tilde, u_half);
  rhs += div_mac(edge_flux(mob_x, mob_y, lagged));

  IonSolve solved = solve_ion(ctx, mob_x, mob_y, d, tau, rhs, params.krylov, c_iter);
  // The exact solution conserves mass; strip the Krylov residual's share.
  solved.x.array() += mean(c_curr) - mean(solved.x);
  return solved;
}

}  // namespace

void SchemeParams::validate() const {
  grid.validate();
  if (!(tau > 0)) throw PreconditionError("scheme: tau must be positive");
  if (!(iter_tol > 0)) throw PreconditionError("scheme: iter_tol must be positive");
  if (max_nonlinear_iters < 1) throw PreconditionError("scheme: max_nonlinear_iters must be >= 1");
  if (!(min_damping > 0 && min_damping <= 1)) throw PreconditionError("scheme: min_damping must lie in (0, 1]");
  krylov.validate();
}

std::pair<EdgeFieldX, EdgeFieldY> regularized_mobility(const CellField& f_tilde, double tau) {
  const double tau8 = std::pow(tau, 8);
  auto regularize = [tau8](double a) { return a > 0.0 ? a : std::sqrt(a * a + tau8); };
  EdgeFieldX mx = avg_x(f_tilde);
  EdgeFieldY my = avg_y(f_tilde);
  mx.array() = mx.array().unaryExpr(regularize);
  my.array() = my.array().unaryExpr(regularize);
  return {std::move(mx), std::move(my)};
}

double f_dif(double a, double x) {
  if (!(a > 0.0) || !(x > 0.0)) throw DomainError("f_dif: arguments must be positive");
  const double s = x - a;
  if (std::abs(s) <= kCoincidence * std::max(a, x))
    return std::log(a) + 1.0 + s / (2.0 * a) - s * s / (6.0 * a * a);
  // x ln x - a ln a = s ln x + a ln(x/a)
  return std::log(x) + a * log_ratio(a, x, s / a) / s;
}

double f_dif_prime(double a, double x) {
  if (!(a > 0.0) || !(x > 0.0)) throw DomainError("f_dif_prime: arguments must be positive");
  const double s = x - a;
  if (std::abs(s) <= kCoincidence * std::max(a, x)) return 1.0 / (2.0 * a) - s / (3.0 * a * a);
  const double t = s / a;
  return std::max(0.0, (t - log_ratio(a, x, t)) / (a * t * t));
}

CellField chem_potential(const CellField& n_new, const CellField& n_old, const CellField& other_new,
                         const CellField& other_old, double tau, const PoissonContext& ctx) {
  require_positive(n_new, "chem_potential");
  require_positive(n_old, "chem_potential");
  require_positive(other_new, "chem_potential");
  require_positive(other_old, "chem_potential");
  const GridSpec& g = n_new.grid();

  CellField charge(g, 0.5 * (n_new.array() + n_old.array()) - 0.5 * (other_new.array() + other_old.array()));
  const double charge_mean = mean(charge);
  if (std::abs(charge_mean) > 1e-10) {
    std::ostringstream os;
    os << "chem_potential: species means differ by " << 2.0 * charge_mean;
    throw PreconditionError(os.str());
  }
  charge.array() -= charge_mean;
  CellField mu = inv_neg_laplace(ctx, charge);

  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      const double a = n_old.array()(i, j);
      const double x = n_new.array()(i, j);
      mu.array()(i, j) += f_dif(a, x) - 1.0 + tau * (std::log(x) - std::log(a));
    }
  return mu;
}

std::pair<SchemeState, StepReport> step(const SchemeState& state, const SchemeParams& params,
                                        const PoissonContext& ctx) {
  const GridSpec& g = state.grid();
  require_same_grid(g, ctx.grid(), "step");
  const double tau = params.tau;
  StepReport report;

  // Frozen explicit quantities.
  const CellField n_tilde = extrapolate_half(state.n_curr, state.n_prev);
  const CellField p_tilde = extrapolate_half(state.p_curr, state.p_prev);
  const auto [n_mob_x, n_mob_y] = regularized_mobility(n_tilde, tau);
  const auto [p_mob_x, p_mob_y] = regularized_mobility(p_tilde, tau);
  const MacVelocity u_tilde = extrapolate_half(state.u_curr, state.u_prev);
  const MacVelocity u_explicit = (2.0 / tau) * state.u_curr - grad_mac(state.psi_curr);

  CellField n_iter = state.n_curr;
  CellField p_iter = state.p_curr;
  MacVelocity u_half = state.u_curr;

  bool converged = false;
  for (int k = 0; k < params.max_nonlinear_iters; ++k) {
    report.nonlinear_iters = k + 1;
    const CellField mu_n = chem_potential(n_iter, state.n_curr, p_iter, state.p_curr, tau, ctx);
    const CellField mu_p = chem_potential(p_iter, state.p_curr, n_iter, state.n_curr, tau, ctx);

    MacVelocity rhs_u = u_explicit - mobility_flux(p_tilde, mu_p) - mobility_flux(n_tilde, mu_n);
    VelocitySolve vel = solve_velocity(ctx, u_tilde, tau, rhs_u, params.krylov, u_half);
    report.krylov_iters_total += vel.stats.iterations;

    IonSolve n_next = ion_update(n_iter, state.n_curr, n_tilde, n_mob_x, n_mob_y, mu_n, vel.v, params, ctx);
    IonSolve p_next = ion_update(p_iter, state.p_curr, p_tilde, p_mob_x, p_mob_y, mu_p, vel.v, params, ctx);
    report.krylov_iters_total += n_next.stats.iterations + p_next.stats.iterations;

    // Positivity safeguard on the concentration update.
    const CellField dn = n_next.x - n_iter;
    const CellField dp = p_next.x - p_iter;
    double theta = 1.0;
    while (!((n_iter.array() + theta * dn.array()).minCoeff() > 0.0 &&
             (p_iter.array() + theta * dp.array()).minCoeff() > 0.0)) {
      theta *= 0.5;
      if (theta < params.min_damping) {
        report.min_n = n_iter.min();
        report.min_p = p_iter.min();
        throw StepError("step: positivity damping fell below " + std::to_string(params.min_damping), report);
      }
    }
    if (theta < 1.0) ++report.damping_events;

    const double change = std::max({theta * norm_inf(dn), theta * norm_inf(dp), inf_diff(vel.v, u_half)});
    n_iter.array() += theta * dn.array();
    p_iter.array() += theta * dp.array();
    u_half = std::move(vel.v);
    report.final_update_norm = change;
    if (!std::isfinite(change)) throw StepError("step: nonlinear iteration produced NaN", report);
    if (change <= params.iter_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    report.min_n = n_iter.min();
    report.min_p = p_iter.min();
    std::ostringstream os;
    os << "step: nonlinear iteration did not converge in " << params.max_nonlinear_iters
       << " iterations (last update " << report.final_update_norm << ")";
    throw StepError(os.str(), report);
  }

  const MacVelocity u_hat_full = 2.0 * u_half - state.u_curr;
  Projection proj = pressure_project(ctx, u_hat_full, state.psi_curr, tau);

  SchemeState next;
  next.n_prev = state.n_curr;
  next.p_prev = state.p_curr;
  next.u_prev = state.u_curr;
  next.n_curr = std::move(n_iter);
  next.p_curr = std::move(p_iter);
  next.u_curr = std::move(proj.u);
  next.psi_curr = std::move(proj.psi);
  next.time = state.time + tau;
  next.step_index = state.step_index + 1;

  report.min_n = next.n_curr.min();
  report.min_p = next.p_curr.min();
  report.div_u_inf = norm_inf(div_mac(next.u_curr));
  return {std::move(next), report};
}

std::pair<SchemeState, StepReport> bootstrap_first_step(const SchemeState& initial,
                                                        const SchemeParams& params,
                                                        const PoissonContext& ctx) {
  SchemeState s = initial;
  s.n_prev = s.n_curr;
  s.p_prev = s.p_curr;
  s.u_prev = s.u_curr;
  return step(s, params, ctx);
}

InitialData paper_initial_data() {
  using std::numbers::pi;
  InitialData d;
  d.p0 = [](double x, double y) { return 0.6 + 0.2 * std::cos(pi * x) * std::cos(0.5 * pi * y); };
  d.n0 = [](double x, double y) { return 0.6 + 0.2 * std::cos(0.5 * pi * x) * std::cos(pi * y); };
  d.u0 = [](double x, double y) {
    const double s = std::sin(pi * x);
    return -0.25 * s * s * std::sin(2 * pi * y);
  };
  d.v0 = [](double x, double y) {
    const double s = std::sin(pi * y);
    return 0.25 * std::sin(2 * pi * x) * s * s;
  };
  d.psi0 = [](double x, double y) { return std::cos(0.5 * pi * x) * std::cos(0.5 * pi * y); };
  return d;
}

InitialData uniform_initial_data(double c) {
  InitialData d;
  d.p0 = [c](double, double) { return c; };
  d.n0 = [c](double, double) { return c; };
  d.u0 = [](double, double) { return 0.0; };
  d.v0 = [](double, double) { return 0.0; };
  d.psi0 = [](double, double) { return 0.0; };
  return d;
}

SchemeState init_from_fields(CellField p, CellField n, MacVelocity u, CellField psi,
                             const PoissonContext& ctx) {
  const GridSpec& g = ctx.grid();
  for (const GridSpec* other : {&p.grid(), &n.grid(), &u.grid(), &psi.grid()})
    require_same_grid(g, *other, "init");
  psi.array() -= mean(psi);
  // Only the velocity part of the projection is used; tau cancels there.
  MacVelocity u0 = pressure_project(ctx, u, CellField(g), 1.0).u;

  SchemeState s;
  s.n_curr = std::move(n);
  s.p_curr = std::move(p);
  s.n_prev = s.n_curr;
  s.p_prev = s.p_curr;
  s.u_curr = std::move(u0);
  s.u_prev = s.u_curr;
  s.psi_curr = std::move(psi);
  return s;
}

SchemeState init_from_functions(const GridSpec& grid, const InitialData& data,
                                const PoissonContext& ctx) {
  return init_from_fields(CellField::sample(grid, data.p0), CellField::sample(grid, data.n0),
                          MacVelocity(EdgeFieldX::sample(grid, data.u0), EdgeFieldY::sample(grid, data.v0)),
                          CellField::sample(grid, data.psi0), ctx);
}

}  // namespace pnpns
