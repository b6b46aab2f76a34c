#pragma once

#include <Eigen/Core>

#include "pnpns/grid.hpp"
#include "pnpns/krylov.hpp"

namespace pnpns {

/// Spectral inverse of the periodic five-point Laplacian on one grid.
///
/// Diagonalizes -Delta_h with the orthonormal real Fourier basis Q (columns:
/// constant, cos/sin pairs, Nyquist). 2-D transforms are Q^T F Q. Immutable
/// after construction, so one context can be shared between threads.
class PoissonContext {
 public:
  explicit PoissonContext(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }

  /// lambda(k, l) = (4/h^2)(sin^2(pi k'/N) + sin^2(pi l'/N)), where k' is the
  /// wavenumber carried by basis column k. lambda(0, 0) = 0.
  const Eigen::ArrayXXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  /// Solves (shift - scale * Delta_h) g = f for a field on any family.
  /// With shift == 0 the zero mode of g is set to 0.
  Eigen::ArrayXXd solve_shifted(const Eigen::ArrayXXd& f, double shift, double scale = 1.0) const;

  template <Location Loc>
  Field<double, Loc> solve_shifted(const Field<double, Loc>& f, double shift, double scale = 1.0) const {
    require_same_grid(grid_, f.grid(), "solve_shifted");
    return Field<double, Loc>(grid_, solve_shifted(f.array(), shift, scale));
  }

 private:
  GridSpec grid_;
  Eigen::MatrixXd basis_;
  Eigen::ArrayXXd eigenvalues_;
};

/// Mean-zero g with -Delta_h g = f - mean(f). Throws PreconditionError if
/// |mean(f)| > 1e-10 * ||f||_inf.
CellField inv_neg_laplace(const PoissonContext& ctx, const CellField& f);

/// ||f||_{-1,h} = sqrt(<f, (-Delta_h)^{-1} f>_C) for mean-zero f.
double norm_minus1(const PoissonContext& ctx, const CellField& f);

struct VelocitySolve {
  MacVelocity v;
  SolveStats stats;
};

/// Solves (2/tau) v + convect(u_tilde, v) - Delta_h v = rhs by BiCGSTAB,
/// preconditioned with the spectral inverse of (2/tau) - Delta_h.
VelocitySolve solve_velocity(const PoissonContext& ctx, const MacVelocity& u_tilde, double tau,
                             const MacVelocity& rhs, const KrylovConfig& cfg);
VelocitySolve solve_velocity(const PoissonContext& ctx, const MacVelocity& u_tilde, double tau,
                             const MacVelocity& rhs, const KrylovConfig& cfg,
                             const MacVelocity& guess);

/// Applies the velocity operator of solve_velocity.
MacVelocity velocity_operator(const MacVelocity& u_tilde, double tau, const MacVelocity& v);

struct IonSolve {
  CellField x;
  SolveStats stats;
};

/// Solves (1/tau) x - div_h(m grad_h(d x)) = rhs with edge mobility m > 0 and
/// diagonal d > 0. Substituting y = d x gives an SPD system for CG.
IonSolve solve_ion(const PoissonContext& ctx, const EdgeFieldX& m_x, const EdgeFieldY& m_y,
                   const CellField& d, double tau, const CellField& rhs, const KrylovConfig& cfg);
IonSolve solve_ion(const PoissonContext& ctx, const EdgeFieldX& m_x, const EdgeFieldY& m_y,
                   const CellField& d, double tau, const CellField& rhs, const KrylovConfig& cfg,
                   const CellField& guess);

/// Applies the ion operator of solve_ion.
CellField ion_operator(const EdgeFieldX& m_x, const EdgeFieldY& m_y, const CellField& d, double tau,
                       const CellField& x);

struct Projection {
  MacVelocity u;
  CellField psi;
  CellField increment;  ///< q = psi_new - psi_old before re-centering
};

/// Discrete Helmholtz projection of u_hat with pressure update:
/// -Delta_h q = -(2/tau) div_h u_hat, u = u_hat - (tau/2) grad_h q,
/// psi = psi_old + q (mean zero).
Projection pressure_project(const PoissonContext& ctx, const MacVelocity& u_hat,
                            const CellField& psi_old, double tau);

}  // namespace pnpns
