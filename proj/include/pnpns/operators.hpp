#pragma once

// Discrete difference, averaging and transport operators on the periodic MAC
// grid. See grid.hpp for the index layout.

#include <utility>

#include "pnpns/grid.hpp"

namespace pnpns {

namespace detail {
inline int up(int i, int n) { return i + 1 == n ? 0 : i + 1; }
inline int dn(int i, int n) { return i == 0 ? n - 1 : i - 1; }

// Centered wide difference (f(i+1) - f(i-1)) / 2h along x or y, same family.
template <typename Scalar, Location Loc>
Field<Scalar, Loc> wide_x(const Field<Scalar, Loc>& f) {
  const int n = f.n();
  const Scalar inv2h = Scalar(1) / (2 * f.grid().h());
  Field<Scalar, Loc> out(f.grid());
  const auto& a = f.array();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out.array()(i, j) = (a(up(i, n), j) - a(dn(i, n), j)) * inv2h;
  return out;
}

template <typename Scalar, Location Loc>
Field<Scalar, Loc> wide_y(const Field<Scalar, Loc>& f) {
  const int n = f.n();
  const Scalar inv2h = Scalar(1) / (2 * f.grid().h());
  Field<Scalar, Loc> out(f.grid());
  const auto& a = f.array();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out.array()(i, j) = (a(i, up(j, n)) - a(i, dn(j, n))) * inv2h;
  return out;
}

template <typename Scalar, Location Loc>
Field<Scalar, Loc> laplace(const Field<Scalar, Loc>& f) {
  const int n = f.n();
  const Scalar inv_h2 = Scalar(1) / (f.grid().h() * f.grid().h());
  Field<Scalar, Loc> out(f.grid());
  const auto& a = f.array();
  for (int j = 0; j < n; ++j) {
    const int jn = up(j, n), js = dn(j, n);
    for (int i = 0; i < n; ++i)
      out.array()(i, j) =
          (a(up(i, n), j) + a(dn(i, n), j) + a(i, jn) + a(i, js) - 4 * a(i, j)) * inv_h2;
  }
  return out;
}

template <typename Scalar, Location A, Location B>
Field<Scalar, A> product(const Field<Scalar, A>& a, const Field<Scalar, B>& b) {
  require_same_grid(a.grid(), b.grid(), "product");
  return Field<Scalar, A>(a.grid(), a.array() * b.array());
}
}  // namespace detail

/// (D_x f, D_y f) on east-west / north-south edges.
template <typename Scalar>
std::pair<EdgeFieldXT<Scalar>, EdgeFieldYT<Scalar>> grad_cell(const CellFieldT<Scalar>& f) {
  const int n = f.n();
  const Scalar inv_h = Scalar(1) / f.grid().h();
  EdgeFieldXT<Scalar> gx(f.grid());
  EdgeFieldYT<Scalar> gy(f.grid());
  const auto& a = f.array();
  for (int j = 0; j < n; ++j) {
    const int js = detail::dn(j, n);
    for (int i = 0; i < n; ++i) {
      gx.array()(i, j) = (a(i, j) - a(detail::dn(i, n), j)) * inv_h;
      gy.array()(i, j) = (a(i, j) - a(i, js)) * inv_h;
    }
  }
  return {std::move(gx), std::move(gy)};
}

template <typename Scalar>
MacVelocityT<Scalar> grad_mac(const CellFieldT<Scalar>& f) {
  auto [gx, gy] = grad_cell(f);
  return MacVelocityT<Scalar>(std::move(gx), std::move(gy));
}

/// Wide-stencil centered differences of a cell field.
template <typename Scalar>
std::pair<CellFieldT<Scalar>, CellFieldT<Scalar>> wide_diff(const CellFieldT<Scalar>& f) {
  return {detail::wide_x(f), detail::wide_y(f)};
}

template <typename Scalar>
CellFieldT<Scalar> div_mac(const MacVelocityT<Scalar>& v) {
  const int n = v.grid().n;
  const Scalar inv_h = Scalar(1) / v.grid().h();
  CellFieldT<Scalar> out(v.grid());
  const auto& ax = v.x.array();
  const auto& ay = v.y.array();
  for (int j = 0; j < n; ++j) {
    const int jn = detail::up(j, n);
    for (int i = 0; i < n; ++i)
      out.array()(i, j) = (ax(detail::up(i, n), j) - ax(i, j)) * inv_h + (ay(i, jn) - ay(i, j)) * inv_h;
  }
  return out;
}

/// Discrete curl (-D_y s, D_x s) of a stream function.
///
/// s(i, j) is read as the value at node (i, j), i.e. the lower-left corner
/// of cell (i, j). Then div_mac(discrete_curl(s)) telescopes to zero.
template <typename Scalar>
MacVelocityT<Scalar> discrete_curl(const CellFieldT<Scalar>& s) {
  const int n = s.n();
  const Scalar inv_h = Scalar(1) / s.grid().h();
  MacVelocityT<Scalar> v(s.grid());
  const auto& a = s.array();
  for (int j = 0; j < n; ++j) {
    const int jn = detail::up(j, n);
    for (int i = 0; i < n; ++i) {
      v.x.array()(i, j) = -(a(i, jn) - a(i, j)) * inv_h;
      v.y.array()(i, j) = (a(detail::up(i, n), j) - a(i, j)) * inv_h;
    }
  }
  return v;
}

template <typename Scalar>
CellFieldT<Scalar> laplace_cell(const CellFieldT<Scalar>& f) {
  return detail::laplace(f);
}

template <typename Scalar>
MacVelocityT<Scalar> laplace_mac(const MacVelocityT<Scalar>& v) {
  return MacVelocityT<Scalar>(detail::laplace(v.x), detail::laplace(v.y));
}

/// A_x f: two-point average of cell values onto east-west edges.
template <typename Scalar>
EdgeFieldXT<Scalar> avg_x(const CellFieldT<Scalar>& f) {
  const int n = f.n();
  EdgeFieldXT<Scalar> out(f.grid());
  const auto& a = f.array();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out.array()(i, j) = Scalar(0.5) * (a(detail::dn(i, n), j) + a(i, j));
  return out;
}

/// A_y f: two-point average of cell values onto north-south edges.
template <typename Scalar>
EdgeFieldYT<Scalar> avg_y(const CellFieldT<Scalar>& f) {
  const int n = f.n();
  EdgeFieldYT<Scalar> out(f.grid());
  const auto& a = f.array();
  for (int j = 0; j < n; ++j) {
    const int js = detail::dn(j, n);
    for (int i = 0; i < n; ++i) out.array()(i, j) = Scalar(0.5) * (a(i, js) + a(i, j));
  }
  return out;
}

/// A_xy u^y: four north-south edges surrounding east-west edge (i, j+1/2).
template <typename Scalar>
EdgeFieldXT<Scalar> avg_xy_x(const EdgeFieldYT<Scalar>& uy) {
  const int n = uy.n();
  EdgeFieldXT<Scalar> out(uy.grid());
  const auto& a = uy.array();
  for (int j = 0; j < n; ++j) {
    const int jn = detail::up(j, n);
    for (int i = 0; i < n; ++i) {
      const int iw = detail::dn(i, n);
      out.array()(i, j) = Scalar(0.25) * (a(iw, j) + a(i, j) + a(iw, jn) + a(i, jn));
    }
  }
  return out;
}

/// A_xy u^x: four east-west edges surrounding north-south edge (i+1/2, j).
template <typename Scalar>
EdgeFieldYT<Scalar> avg_xy_y(const EdgeFieldXT<Scalar>& ux) {
  const int n = ux.n();
  EdgeFieldYT<Scalar> out(ux.grid());
  const auto& a = ux.array();
  for (int j = 0; j < n; ++j) {
    const int js = detail::dn(j, n);
    for (int i = 0; i < n; ++i) {
      const int ie = detail::up(i, n);
      out.array()(i, j) = Scalar(0.25) * (a(i, js) + a(i, j) + a(ie, js) + a(ie, j));
    }
  }
  return out;
}

/// Skew-symmetric convection b_h(u, v) = (u . grad_h v + div_h(v u^T)) / 2.
///
/// ip_vec(convect(u, v), v) vanishes for every u, v (periodic).
template <typename Scalar>
MacVelocityT<Scalar> convect(const MacVelocityT<Scalar>& u, const MacVelocityT<Scalar>& v) {
  require_same_grid(u.grid(), v.grid(), "convect");
  using detail::product;
  using detail::wide_x;
  using detail::wide_y;
  const EdgeFieldXT<Scalar> uy_on_x = avg_xy_x(u.y);
  const EdgeFieldYT<Scalar> ux_on_y = avg_xy_y(u.x);

  EdgeFieldXT<Scalar> cx = product(u.x, wide_x(v.x)) + product(uy_on_x, wide_y(v.x)) +
                           wide_x(product(u.x, v.x)) + wide_y(product(uy_on_x, v.x));
  EdgeFieldYT<Scalar> cy = product(ux_on_y, wide_x(v.y)) + product(u.y, wide_y(v.y)) +
                           wide_x(product(ux_on_y, v.y)) + wide_y(product(u.y, v.y));
  cx *= Scalar(0.5);
  cy *= Scalar(0.5);
  return MacVelocityT<Scalar>(std::move(cx), std::move(cy));
}

/// A_h f grad_h g.
template <typename Scalar>
MacVelocityT<Scalar> mobility_flux(const CellFieldT<Scalar>& f, const CellFieldT<Scalar>& g) {
  require_same_grid(f.grid(), g.grid(), "mobility_flux");
  auto [gx, gy] = grad_cell(g);
  gx.array() *= avg_x(f).array();
  gy.array() *= avg_y(f).array();
  return MacVelocityT<Scalar>(std::move(gx), std::move(gy));
}

/// Edge-weighted flux m grad_h g for explicitly given edge coefficients.
template <typename Scalar>
MacVelocityT<Scalar> edge_flux(const EdgeFieldXT<Scalar>& mx, const EdgeFieldYT<Scalar>& my,
                               const CellFieldT<Scalar>& g) {
  auto [gx, gy] = grad_cell(g);
  gx.array() *= mx.array();
  gy.array() *= my.array();
  return MacVelocityT<Scalar>(std::move(gx), std::move(gy));
}

/// div_h(A_h f u).
template <typename Scalar>
CellFieldT<Scalar> div_mobility(const CellFieldT<Scalar>& f, const MacVelocityT<Scalar>& u) {
  require_same_grid(f.grid(), u.grid(), "div_mobility");
  MacVelocityT<Scalar> w = u;
  w.x.array() *= avg_x(f).array();
  w.y.array() *= avg_y(f).array();
  return div_mac(w);
}

}  // namespace pnpns
