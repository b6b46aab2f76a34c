#include "pnpns/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pnpns/norms.hpp"
#include "pnpns/operators.hpp"

namespace pnpns {

namespace {

Eigen::VectorXd flatten(const MacVelocity& v) {
  const Eigen::Index m = v.x.array().size();
  Eigen::VectorXd out(2 * m);
  out.head(m) = Eigen::Map<const Eigen::VectorXd>(v.x.array().data(), m);
  out.tail(m) = Eigen::Map<const Eigen::VectorXd>(v.y.array().data(), m);
  return out;
}

MacVelocity unflatten(const GridSpec& g, const Eigen::VectorXd& flat) {
  const Eigen::Index m = g.size();
  MacVelocity v(g);
  Eigen::Map<Eigen::VectorXd>(v.x.array().data(), m) = flat.head(m);
  Eigen::Map<Eigen::VectorXd>(v.y.array().data(), m) = flat.tail(m);
  return v;
}

Eigen::VectorXd flatten(const CellField& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.array().data(), f.array().size());
}

CellField unflatten_cell(const GridSpec& g, const Eigen::VectorXd& flat) {
  CellField f(g);
  Eigen::Map<Eigen::VectorXd>(f.array().data(), g.size()) = flat;
  return f;
}

void require_positive(const Eigen::ArrayXXd& a, const char* what) {
  if (!(a.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << "solve_ion: " << what << " must be positive, min = " << a.minCoeff();
    throw PreconditionError(os.str());
  }
}

}  // namespace

PoissonContext::PoissonContext(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  const int n = grid_.n;
  const double h = grid_.h();
  basis_.resize(n, n);
  Eigen::VectorXd lambda(n);
  const double c0 = 1.0 / std::sqrt(double(n));
  const double c1 = std::sqrt(2.0 / n);
  auto eig = [&](int k) {
    const double s = std::sin(std::numbers::pi * k / n);
    return 4.0 / (h * h) * s * s;
  };
  for (int j = 0; j < n; ++j) {
    basis_(j, 0) = c0;
    for (int k = 1; k < n / 2; ++k) {
      const double theta = 2.0 * std::numbers::pi * k * j / n;
      basis_(j, 2 * k - 1) = c1 * std::cos(theta);
      basis_(j, 2 * k) = c1 * std::sin(theta);
    }
    basis_(j, n - 1) = (j % 2 == 0 ? c0 : -c0);
  }
  lambda(0) = 0.0;
  for (int k = 1; k < n / 2; ++k) lambda(2 * k - 1) = lambda(2 * k) = eig(k);
  lambda(n - 1) = eig(n / 2);

  eigenvalues_.resize(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) eigenvalues_(k, l) = lambda(k) + lambda(l);
  eigenvalues_(0, 0) = 0.0;
}

Eigen::ArrayXXd PoissonContext::solve_shifted(const Eigen::ArrayXXd& f, double shift,
                                              double scale) const {
  Eigen::MatrixXd coeff = basis_.transpose() * f.matrix() * basis_;
  Eigen::ArrayXXd denom = shift + scale * eigenvalues_;
  if (shift == 0.0) denom(0, 0) = 1.0;
  coeff.array() /= denom;
  if (shift == 0.0) coeff(0, 0) = 0.0;
  return (basis_ * coeff * basis_.transpose()).array();
}

CellField inv_neg_laplace(const PoissonContext& ctx, const CellField& f) {
  require_same_grid(ctx.grid(), f.grid(), "inv_neg_laplace");
  const double m = mean(f);
  const double scale = norm_inf(f);
  if (std::abs(m) > 1e-10 * scale) {
    std::ostringstream os;
    os << "inv_neg_laplace: input must be mean-zero, mean = " << m << " (||f||_inf = " << scale << ")";
    throw PreconditionError(os.str());
  }
  CellField g = ctx.solve_shifted(f, 0.0);
  g.array() -= mean(g);
  return g;
}

double norm_minus1(const PoissonContext& ctx, const CellField& f) {
  const double s = ip_C(f, inv_neg_laplace(ctx, f));
  return std::sqrt(std::max(s, 0.0));
}

MacVelocity velocity_operator(const MacVelocity& u_tilde, double tau, const MacVelocity& v) {
  MacVelocity out = (2.0 / tau) * v;
  out += convect(u_tilde, v);
  out -= laplace_mac(v);
  return out;
}

VelocitySolve solve_velocity(const PoissonContext& ctx, const MacVelocity& u_tilde, double tau,
                             const MacVelocity& rhs, const KrylovConfig& cfg) {
  return solve_velocity(ctx, u_tilde, tau, rhs, cfg, MacVelocity(rhs.grid()));
}

VelocitySolve solve_velocity(const PoissonContext& ctx, const MacVelocity& u_tilde, double tau,
                             const MacVelocity& rhs, const KrylovConfig& cfg,
                             const MacVelocity& guess) {
  if (!(tau > 0)) throw PreconditionError("solve_velocity: tau must be positive");
  const GridSpec& g = ctx.grid();
  require_same_grid(g, u_tilde.grid(), "solve_velocity");
  require_same_grid(g, rhs.grid(), "solve_velocity");
  const double h = g.h();
  const Eigen::Index m = g.size();

  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y = flatten(velocity_operator(u_tilde, tau, unflatten(g, x)));
  };
  auto precondition = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    z.resize(2 * m);
    Eigen::Map<Eigen::ArrayXXd> zx(z.data(), g.n, g.n), zy(z.data() + m, g.n, g.n);
    zx = ctx.solve_shifted(Eigen::Map<const Eigen::ArrayXXd>(r.data(), g.n, g.n), 2.0 / tau);
    zy = ctx.solve_shifted(Eigen::Map<const Eigen::ArrayXXd>(r.data() + m, g.n, g.n), 2.0 / tau);
  };
  auto norm = [h](const Eigen::VectorXd& v) { return h * v.norm(); };

  const Eigen::VectorXd b = flatten(rhs);
  Eigen::VectorXd x = flatten(guess);
  const SolveStats stats = krylov::bicgstab(apply, precondition, norm, b, x, cfg, "solve_velocity");
  return {unflatten(g, x), stats};
}

CellField ion_operator(const EdgeFieldX& m_x, const EdgeFieldY& m_y, const CellField& d, double tau,
                       const CellField& x) {
  const CellField y(x.grid(), d.array() * x.array());
  CellField out = (1.0 / tau) * x;
  out -= div_mac(edge_flux(m_x, m_y, y));
  return out;
}

IonSolve solve_ion(const PoissonContext& ctx, const EdgeFieldX& m_x, const EdgeFieldY& m_y,
                   const CellField& d, double tau, const CellField& rhs, const KrylovConfig& cfg) {
  return solve_ion(ctx, m_x, m_y, d, tau, rhs, cfg, CellField(rhs.grid()));
}

IonSolve solve_ion(const PoissonContext& ctx, const EdgeFieldX& m_x, const EdgeFieldY& m_y,
                   const CellField& d, double tau, const CellField& rhs, const KrylovConfig& cfg,
                   const CellField& guess) {
  if (!(tau > 0)) throw PreconditionError("solve_ion: tau must be positive");
  const GridSpec& g = ctx.grid();
  for (const GridSpec* other : {&m_x.grid(), &m_y.grid(), &d.grid(), &rhs.grid()})
    require_same_grid(g, *other, "solve_ion");
  require_positive(m_x.array(), "edge mobility m_x");
  require_positive(m_y.array(), "edge mobility m_y");
  require_positive(d.array(), "diagonal d");

  const double h = g.h();
  const Eigen::ArrayXXd inv_td = 1.0 / (tau * d.array());
  // Constant-coefficient surrogate of the operator for preconditioning.
  const double shift = inv_td.mean();
  const double m_bar = 0.5 * (m_x.array().mean() + m_y.array().mean());

  // Symmetric form in y = d x: (1/(tau d)) y - div_h(m grad_h y) = rhs.
  auto apply = [&](const Eigen::VectorXd& yv, Eigen::VectorXd& out) {
    const CellField y = unflatten_cell(g, yv);
    CellField r(g, inv_td * y.array());
    r -= div_mac(edge_flux(m_x, m_y, y));
    out = flatten(r);
  };
  auto precondition = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    z.resize(r.size());
    Eigen::Map<Eigen::ArrayXXd>(z.data(), g.n, g.n) =
        ctx.solve_shifted(Eigen::Map<const Eigen::ArrayXXd>(r.data(), g.n, g.n), shift, m_bar);
  };
  auto norm = [h](const Eigen::VectorXd& v) { return h * v.norm(); };

  const Eigen::VectorXd b = flatten(rhs);
  Eigen::VectorXd y = flatten(CellField(g, d.array() * guess.array()));
  const SolveStats stats = krylov::pcg(apply, precondition, norm, b, y, cfg, "solve_ion");
  CellField x = unflatten_cell(g, y);
  x.array() /= d.array();
  return {std::move(x), stats};
}

Projection pressure_project(const PoissonContext& ctx, const MacVelocity& u_hat,
                            const CellField& psi_old, double tau) {
  if (!(tau > 0)) throw PreconditionError("pressure_project: tau must be positive");
  require_same_grid(ctx.grid(), u_hat.grid(), "pressure_project");
  require_same_grid(ctx.grid(), psi_old.grid(), "pressure_project");
  CellField source = (-2.0 / tau) * div_mac(u_hat);
  // div of a periodic field has zero mean up to round-off; remove the residue.
  source.array() -= mean(source);
  CellField q = inv_neg_laplace(ctx, source);
  MacVelocity u = u_hat - (0.5 * tau) * grad_mac(q);
  CellField psi = psi_old + q;
  psi.array() -= mean(psi);
  return {std::move(u), std::move(psi), std::move(q)};
}

}  // namespace pnpns
