#pragma once

// Matrix-free preconditioned Krylov iterations on flat Eigen vectors.
//
// `apply(x, y)` writes y = A x, `precondition(r, z)` writes z = M^{-1} r.
// Convergence is declared on the true residual ||b - A x||, measured with
// `norm`, against rel_tolerance * ||b|| + abs_tolerance.

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "pnpns/errors.hpp"

namespace pnpns {

struct KrylovConfig {
  double rel_tolerance = 1e-11;
  double abs_tolerance = 1e-13;
  int max_iterations = 500;

  void validate() const {
    if (!(rel_tolerance > 0) || !(abs_tolerance > 0) || max_iterations < 1)
      throw PreconditionError("krylov: tolerances must be positive and max_iterations >= 1");
  }
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

namespace krylov {

using Vector = Eigen::VectorXd;

/// Right-preconditioned BiCGSTAB for a nonsymmetric operator.
template <typename Apply, typename Precondition, typename Norm>
SolveStats bicgstab(Apply&& apply, Precondition&& precondition, Norm&& norm, const Vector& b,
                    Vector& x, const KrylovConfig& cfg, const char* name) {
  cfg.validate();
  const double target = cfg.rel_tolerance * norm(b) + cfg.abs_tolerance;
  const Eigen::Index n = b.size();
  Vector r(n), r_hat(n), p(n), v(n), s(n), t(n), p_hat(n), s_hat(n), ax(n);

  apply(x, ax);
  r = b - ax;
  double res = norm(r);
  if (res <= target) return {0, res};
  r_hat = r;
  double rho = 1, alpha = 1, omega = 1;
  v.setZero();
  p.setZero();

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const double rho_new = r_hat.dot(r);
    if (rho_new == 0.0 || !std::isfinite(rho_new)) {
      // Breakdown: restart from the current iterate with a fresh shadow vector.
      apply(x, ax);
      r = b - ax;
      r_hat = r;
      rho = 1, alpha = 1, omega = 1;
      v.setZero();
      p.setZero();
      if (!std::isfinite(r.squaredNorm())) throw DivergenceError(std::string(name) + ": NaN in residual");
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    precondition(p, p_hat);
    apply(p_hat, v);
    alpha = rho / r_hat.dot(v);
    s = r - alpha * v;
    x += alpha * p_hat;
    res = norm(s);
    if (res <= target) {
      apply(x, ax);
      r = b - ax;
      res = norm(r);
      if (res <= target) return {it, res};
      continue;
    }
    precondition(s, s_hat);
    apply(s_hat, t);
    const double tt = t.dot(t);
    omega = tt > 0 ? t.dot(s) / tt : 0.0;
    x += omega * s_hat;
    r = s - omega * t;
    res = norm(r);
    if (!std::isfinite(res)) throw DivergenceError(std::string(name) + ": NaN in residual");
    if (res <= target) {
      apply(x, ax);
      res = norm(b - ax);
      if (res <= target) return {it, res};
    }
    if (omega == 0.0) omega = 1e-300;
  }
  throw ConvergenceError(std::string(name) + ": no convergence in " +
                             std::to_string(cfg.max_iterations) + " iterations, residual " +
                             std::to_string(res),
                         res, cfg.max_iterations);
}

/// Preconditioned conjugate gradients for an SPD operator.
template <typename Apply, typename Precondition, typename Norm>
SolveStats pcg(Apply&& apply, Precondition&& precondition, Norm&& norm, const Vector& b, Vector& x,
               const KrylovConfig& cfg, const char* name) {
  cfg.validate();
  const double target = cfg.rel_tolerance * norm(b) + cfg.abs_tolerance;
  const Eigen::Index n = b.size();
  Vector r(n), z(n), p(n), q(n);

  apply(x, q);
  r = b - q;
  double res = norm(r);
  if (res <= target) return {0, res};
  precondition(r, z);
  p = z;
  double rz = r.dot(z);

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    apply(p, q);
    const double pq = p.dot(q);
    if (!(pq > 0)) throw DivergenceError(std::string(name) + ": operator not positive definite");
    const double alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    res = norm(r);
    if (!std::isfinite(res)) throw DivergenceError(std::string(name) + ": NaN in residual");
    if (res <= target) {
      apply(x, q);
      res = norm(b - q);
      if (res <= target) return {it, res};
      r = b - q;
    }
    precondition(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw ConvergenceError(std::string(name) + ": no convergence in " +
                             std::to_string(cfg.max_iterations) + " iterations, residual " +
                             std::to_string(res),
                         res, cfg.max_iterations);
}

}  // namespace krylov
}  // namespace pnpns
