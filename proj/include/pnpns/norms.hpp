#pragma once

// h^2-weighted inner products and norms. All reductions use pairwise_sum so
// results do not depend on loop scheduling.

#include <cmath>
#include <limits>

#include "pnpns/grid.hpp"

namespace pnpns {

namespace detail {
template <typename Scalar, Location A, Location B>
Scalar weighted_dot(const Field<Scalar, A>& a, const Field<Scalar, B>& b, const char* where) {
  require_same_grid(a.grid(), b.grid(), where);
  const auto prod = (a.array() * b.array()).eval();
  const Scalar h = a.grid().h();
  return h * h * pairwise_sum<Scalar>({prod.data(), static_cast<std::size_t>(prod.size())});
}
}  // namespace detail

/// <a, b>_A on east-west edges.
template <typename Scalar>
Scalar ip_A(const EdgeFieldXT<Scalar>& a, const EdgeFieldXT<Scalar>& b) {
  return detail::weighted_dot(a, b, "ip_A");
}

/// <a, b>_B on north-south edges.
template <typename Scalar>
Scalar ip_B(const EdgeFieldYT<Scalar>& a, const EdgeFieldYT<Scalar>& b) {
  return detail::weighted_dot(a, b, "ip_B");
}

/// <a, b>_C on cell centers.
template <typename Scalar>
Scalar ip_C(const CellFieldT<Scalar>& a, const CellFieldT<Scalar>& b) {
  return detail::weighted_dot(a, b, "ip_C");
}

template <typename Scalar>
Scalar ip_vec(const MacVelocityT<Scalar>& u, const MacVelocityT<Scalar>& v) {
  return ip_A(u.x, v.x) + ip_B(u.y, v.y);
}

template <typename Scalar, Location Loc>
Scalar norm_l2(const Field<Scalar, Loc>& f) {
  using std::sqrt;
  return sqrt(detail::weighted_dot(f, f, "norm_l2"));
}

template <typename Scalar>
Scalar norm_l2(const MacVelocityT<Scalar>& v) {
  using std::sqrt;
  return sqrt(ip_vec(v, v));
}

template <typename Scalar, Location Loc>
Scalar norm_lp(const Field<Scalar, Loc>& f, double p) {
  using std::pow;
  if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("norm_lp: p must lie in [1, inf)");
  const auto powed = f.array().abs().pow(Scalar(p)).eval();
  const Scalar h = f.grid().h();
  const Scalar s = h * h * pairwise_sum<Scalar>({powed.data(), static_cast<std::size_t>(powed.size())});
  return pow(s, Scalar(1.0 / p));
}

template <typename Scalar, Location Loc>
Scalar norm_inf(const Field<Scalar, Loc>& f) {
  return f.array().abs().maxCoeff();
}

template <typename Scalar>
Scalar norm_inf(const MacVelocityT<Scalar>& v) {
  using std::max;
  return max(norm_inf(v.x), norm_inf(v.y));
}

/// Discrete average <f, 1>_C / |Omega|.
template <typename Scalar>
Scalar mean(const CellFieldT<Scalar>& f) {
  const auto flat = f.flat();
  return pairwise_sum<Scalar>(flat) / Scalar(flat.size());
}

}  // namespace pnpns
