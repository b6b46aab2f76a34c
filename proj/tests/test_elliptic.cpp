#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "pnpns/elliptic.hpp"
#include "pnpns/norms.hpp"
#include "pnpns/operators.hpp"

using namespace pnpns;
using oracle::flat;

namespace {

CellField random_mean_zero(std::mt19937_64& rng, const GridSpec& g) {
  CellField f(g, oracle::random_array(rng, g.n));
  f.array() -= mean(f);
  return f;
}

MacVelocity random_mac(std::mt19937_64& rng, const GridSpec& g, double scale = 1.0) {
  return MacVelocity(EdgeFieldX(g, scale * oracle::random_array(rng, g.n)),
                     EdgeFieldY(g, scale * oracle::random_array(rng, g.n)));
}

// Sum of squared forward differences over both axes of a periodic array,
// i.e. ||grad_h a||_2^2 for one component (the h factors cancel).
double grad_sq(const Eigen::ArrayXXd& a) {
  const int n = static_cast<int>(a.rows());
  double s = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double dx = a((i + 1) % n, j) - a(i, j);
      const double dy = a(i, (j + 1) % n) - a(i, j);
      s += dx * dx + dy * dy;
    }
  return s;
}

}  // namespace

TEST_CASE("PoissonContext spectrum and basis") {
  const GridSpec g = GridSpec::centered(8);
  const PoissonContext ctx(g);
  const auto& lam = ctx.eigenvalues();
  CHECK(lam(0, 0) == 0.0);
  int positive = 0;
  for (int l = 0; l < 8; ++l)
    for (int k = 0; k < 8; ++k)
      if (k + l > 0 && lam(k, l) > 0) ++positive;
  CHECK(positive == 63);
  const Eigen::MatrixXd& q = ctx.basis();
  CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-14);
  // Columns are eigenvectors of the 1-D periodic second difference.
  for (int k = 0; k < 8; ++k) {
    CellField mode(g);
    for (int i = 0; i < 8; ++i) mode.array().col(0)(i) = q(i, k);
    for (int j = 1; j < 8; ++j) mode.array().col(j) = mode.array().col(0);
    const CellField lm = laplace_cell(mode);
    CHECK(norm_inf(lm + lam(k, 0) * mode) < 1e-12);
  }
}

TEST_CASE("inv_neg_laplace") {
  SUBCASE("zero input") {
    const PoissonContext ctx(GridSpec::centered(8));
    CHECK(norm_inf(inv_neg_laplace(ctx, CellField(ctx.grid()))) == 0.0);
  }
  SUBCASE("single mode on N = 4, h = 1: eigenvalue 2") {
    const PoissonContext ctx(GridSpec::centered(4));
    const CellField f = CellField::sample(ctx.grid(), [](double x, double) { return std::cos(std::numbers::pi * x / 2); });
    CHECK(norm_inf(inv_neg_laplace(ctx, f) - 0.5 * f) < 1e-14);
  }
  SUBCASE("random mean-zero input matches dense pseudo-inverse") {
    std::mt19937_64 rng(11);
    const PoissonContext ctx(GridSpec::centered(8));
    const oracle::Dense d(ctx.grid());
    const Eigen::MatrixXd neg_lap = -d.laplace();
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(neg_lap);
    for (int trial = 0; trial < 5; ++trial) {
      const CellField f = random_mean_zero(rng, ctx.grid());
      const CellField g = inv_neg_laplace(ctx, f);
      const Eigen::VectorXd expected = cod.solve(flat(f.array()));
      CHECK(oracle::max_abs(flat(g.array()) - expected) < 1e-10);
      CHECK(std::abs(mean(g)) <= 1e-13);
      CHECK(norm_inf(-1.0 * laplace_cell(g) - f) <= 1e-11 * norm_inf(f));
    }
  }
  SUBCASE("non-mean-zero input is rejected") {
    const PoissonContext ctx(GridSpec::centered(8));
    const CellField f = CellField::constant(ctx.grid(), 1.0);
    CHECK_THROWS_AS(inv_neg_laplace(ctx, f), PreconditionError);
  }
  SUBCASE("grid mismatch") {
    const PoissonContext ctx(GridSpec::centered(8));
    CHECK_THROWS_AS(inv_neg_laplace(ctx, CellField(GridSpec::centered(4))), StructuralError);
  }
}

TEST_CASE("norm_minus1") {
  std::mt19937_64 rng(12);
  const PoissonContext ctx4(GridSpec::centered(4));
  CHECK(norm_minus1(ctx4, CellField(ctx4.grid())) == 0.0);
  const CellField mode = CellField::sample(ctx4.grid(), [](double x, double) { return std::cos(std::numbers::pi * x / 2); });
  const double l2 = norm_l2(mode);
  CHECK(norm_minus1(ctx4, mode) * norm_minus1(ctx4, mode) == doctest::Approx(0.5 * l2 * l2).epsilon(1e-13));

  const PoissonContext ctx(GridSpec::centered(16));
  // Poincare constant of the discrete problem: 1/sqrt(smallest nonzero eigenvalue).
  const double h = ctx.grid().h();
  const double s = std::sin(std::numbers::pi / 16);
  const double c0 = 1.0 / std::sqrt(4.0 / (h * h) * s * s);
  for (int trial = 0; trial < 20; ++trial) {
    const CellField f = random_mean_zero(rng, ctx.grid());
    const double nf = norm_minus1(ctx, f);
    CHECK(norm_minus1(ctx, -3.5 * f) == doctest::Approx(3.5 * nf).epsilon(1e-12));
    CHECK(nf <= c0 * norm_l2(f) * (1 + 1e-12));
  }
}

TEST_CASE("solve_velocity") {
  const GridSpec g = GridSpec::centered(8);
  const PoissonContext ctx(g);
  const double tau = 0.1 * g.h();
  const KrylovConfig cfg;
  std::mt19937_64 rng(13);

  SUBCASE("zero right-hand side") {
    const auto r = solve_velocity(ctx, random_mac(rng, g), tau, MacVelocity(g), cfg);
    CHECK(norm_inf(r.v) == 0.0);
  }
  SUBCASE("Fourier mode of the constant-coefficient operator") {
    auto w_fn = [](double x, double y) {
      return std::cos(2 * std::numbers::pi * x / 4) * std::cos(2 * std::numbers::pi * y / 4);
    };
    const MacVelocity w(EdgeFieldX::sample(g, w_fn), EdgeFieldY::sample(g, w_fn));
    const double s = std::sin(std::numbers::pi / 8);
    const double factor = 2.0 / tau + 4.0 / (g.h() * g.h()) * s * s * 2;
    const auto r = solve_velocity(ctx, MacVelocity(g), tau, factor * w, cfg);
    CHECK(norm_inf(r.v - w) < 1e-10);
  }
  SUBCASE("random instance matches dense direct solve") {
    const oracle::Dense d(g);
    for (int trial = 0; trial < 3; ++trial) {
      const MacVelocity ut = random_mac(rng, g);
      const MacVelocity rhs = random_mac(rng, g, 10.0);
      const Eigen::MatrixXd a = (2.0 / tau) * Eigen::MatrixXd::Identity(128, 128) +
                                d.convect(flat(ut.x.array()), flat(ut.y.array())) - d.block_laplace();
      const Eigen::VectorXd expected = a.partialPivLu().solve(oracle::stack(flat(rhs.x.array()), flat(rhs.y.array())));
      const auto r = solve_velocity(ctx, ut, tau, rhs, cfg);
      CHECK(oracle::max_abs(oracle::stack(flat(r.v.x.array()), flat(r.v.y.array())) - expected) < 1e-9);
      const MacVelocity resid = rhs - velocity_operator(ut, tau, r.v);
      CHECK(norm_l2(resid) <= cfg.rel_tolerance * norm_l2(rhs) + cfg.abs_tolerance);
    }
  }
  SUBCASE("operator is coercive") {
    for (int trial = 0; trial < 5; ++trial) {
      const MacVelocity ut = random_mac(rng, g);
      const MacVelocity v = random_mac(rng, g);
      const double lhs = ip_vec(velocity_operator(ut, tau, v), v);
      const double rhs = 2.0 / tau * ip_vec(v, v) + grad_sq(v.x.array()) + grad_sq(v.y.array());
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
  SUBCASE("errors") {
    const MacVelocity rhs = random_mac(rng, g);
    CHECK_THROWS_AS(solve_velocity(ctx, MacVelocity(g), 0.0, rhs, cfg), PreconditionError);
    KrylovConfig tight;
    tight.max_iterations = 1;
    tight.rel_tolerance = 1e-15;
    tight.abs_tolerance = 1e-300;
    CHECK_THROWS_AS(solve_velocity(ctx, random_mac(rng, g, 5.0), tau, rhs, tight), ConvergenceError);
  }
}

TEST_CASE("solve_ion") {
  const GridSpec g = GridSpec::centered(8);
  const PoissonContext ctx(g);
  const double tau = 0.1 * g.h();
  const KrylovConfig cfg;
  std::mt19937_64 rng(14);
  const EdgeFieldX one_x = EdgeFieldX::constant(g, 1.0);
  const EdgeFieldY one_y = EdgeFieldY::constant(g, 1.0);
  const CellField one = CellField::constant(g, 1.0);

  SUBCASE("Fourier mode with unit coefficients") {
    const CellField w = CellField::sample(g, [](double x, double) { return std::cos(2 * std::numbers::pi * x / 4); });
    const double s = std::sin(std::numbers::pi / 8);
    const double lambda10 = 4.0 / (g.h() * g.h()) * s * s;
    const auto r = solve_ion(ctx, one_x, one_y, one, tau, (1.0 / tau + lambda10) * w, cfg);
    CHECK(norm_inf(r.x - w) < 1e-10);
  }
  SUBCASE("uniform solution for arbitrary mobility") {
    const EdgeFieldX mx(g, oracle::random_array(rng, 8, 0.1, 2.0));
    const EdgeFieldY my(g, oracle::random_array(rng, 8, 0.1, 2.0));
    const CellField x = CellField::constant(g, 0.6);
    const auto r = solve_ion(ctx, mx, my, one, tau, (1.0 / tau) * x, cfg);
    CHECK(norm_inf(r.x - x) < 1e-12);
  }
  SUBCASE("random SPD instance matches dense direct solve") {
    const oracle::Dense d(g);
    for (int trial = 0; trial < 3; ++trial) {
      const EdgeFieldX mx(g, oracle::random_array(rng, 8, 0.05, 1.5));
      const EdgeFieldY my(g, oracle::random_array(rng, 8, 0.05, 1.5));
      const CellField diag(g, oracle::random_array(rng, 8, 0.3, 3.0));
      const CellField rhs(g, 50.0 * oracle::random_array(rng, 8));
      const Eigen::MatrixXd flux = d.div_x() * flat(mx.array()).asDiagonal() * d.grad_x() +
                                   d.div_y() * flat(my.array()).asDiagonal() * d.grad_y();
      const Eigen::MatrixXd a = (1.0 / tau) * Eigen::MatrixXd::Identity(64, 64) - flux * flat(diag.array()).asDiagonal();
      const Eigen::VectorXd expected = a.partialPivLu().solve(flat(rhs.array()));
      const auto r = solve_ion(ctx, mx, my, diag, tau, rhs, cfg);
      CHECK(oracle::max_abs(flat(r.x.array()) - expected) < 1e-9);
      const CellField resid = rhs - ion_operator(mx, my, diag, tau, r.x);
      CHECK(norm_l2(resid) <= cfg.rel_tolerance * norm_l2(rhs) + cfg.abs_tolerance);
    }
  }
  SUBCASE("nonpositive coefficients are rejected") {
    EdgeFieldX bad = one_x;
    bad(2, 3) = 0.0;
    CHECK_THROWS_AS(solve_ion(ctx, bad, one_y, one, tau, one, cfg), PreconditionError);
    CellField bad_d = one;
    bad_d(1, 1) = -0.5;
    CHECK_THROWS_AS(solve_ion(ctx, one_x, one_y, bad_d, tau, one, cfg), PreconditionError);
  }
}

TEST_CASE("pressure_project") {
  const GridSpec g = GridSpec::centered(8);
  const PoissonContext ctx(g);
  const double tau = 0.1 * g.h();
  std::mt19937_64 rng(15);

  SUBCASE("divergence-free input is left alone") {
    const MacVelocity u = discrete_curl(CellField(g, oracle::random_array(rng, 8)));
    const CellField psi = random_mean_zero(rng, g);
    const Projection p = pressure_project(ctx, u, psi, tau);
    CHECK(norm_inf(p.u - u) < 1e-12);
    CHECK(norm_inf(p.psi - psi) < 1e-10);
  }
  SUBCASE("pure gradient is removed and becomes pressure") {
    const CellField s = random_mean_zero(rng, g);
    const Projection p = pressure_project(ctx, grad_mac(s), CellField(g), tau);
    CHECK(norm_inf(p.u) < 1e-11);
    CHECK(norm_inf(p.increment - (2.0 / tau) * s) < 1e-9);
    CHECK(std::abs(mean(p.psi)) < 1e-13);
  }
  SUBCASE("random input: solenoidal output, idempotent, dense oracle") {
    const oracle::Dense d(g);
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(-d.laplace());
    for (int trial = 0; trial < 3; ++trial) {
      const MacVelocity u = random_mac(rng, g);
      const Projection p = pressure_project(ctx, u, CellField(g), tau);
      CHECK(norm_inf(div_mac(p.u)) <= 1e-11);
      const Projection again = pressure_project(ctx, p.u, p.psi, tau);
      CHECK(norm_inf(again.u - p.u) <= 1e-12);

      const Eigen::VectorXd div = d.div_x() * flat(u.x.array()) + d.div_y() * flat(u.y.array());
      const Eigen::VectorXd q = cod.solve((-2.0 / tau) * div);
      const Eigen::VectorXd ux = flat(u.x.array()) - 0.5 * tau * d.grad_x() * q;
      const Eigen::VectorXd uy = flat(u.y.array()) - 0.5 * tau * d.grad_y() * q;
      CHECK(oracle::max_abs(flat(p.u.x.array()) - ux) < 1e-9);
      CHECK(oracle::max_abs(flat(p.u.y.array()) - uy) < 1e-9);
      CHECK(oracle::max_abs(flat(p.psi.array()) - q) < 1e-9);
    }
  }
}
