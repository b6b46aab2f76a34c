#pragma once

// Fine-to-coarse restriction used by the Cauchy-error study.

#include "pnpns/grid.hpp"

namespace pnpns {

inline GridSpec coarsen(const GridSpec& fine) {
  if (fine.n % 2 != 0 || fine.n / 2 < 4)
    throw StructuralError("restrict: fine grid with " + std::to_string(fine.n) +
                          " cells cannot be halved");
  return GridSpec(fine.n / 2, fine.length, fine.origin_x, fine.origin_y);
}

/// Mean of the 2x2 fine children of each coarse cell.
template <typename Scalar>
CellFieldT<Scalar> restrict_cell(const CellFieldT<Scalar>& fine) {
  const GridSpec coarse = coarsen(fine.grid());
  CellFieldT<Scalar> out(coarse);
  const auto& a = fine.array();
  for (int j = 0; j < coarse.n; ++j)
    for (int i = 0; i < coarse.n; ++i)
      out.array()(i, j) = Scalar(0.25) * (a(2 * i, 2 * j) + a(2 * i + 1, 2 * j) +
                                          a(2 * i, 2 * j + 1) + a(2 * i + 1, 2 * j + 1));
  return out;
}

/// Coarse edge value = mean of the two fine edges on the same grid line.
template <typename Scalar>
MacVelocityT<Scalar> restrict_mac(const MacVelocityT<Scalar>& fine) {
  const GridSpec coarse = coarsen(fine.grid());
  MacVelocityT<Scalar> out(coarse);
  const auto& ax = fine.x.array();
  const auto& ay = fine.y.array();
  for (int j = 0; j < coarse.n; ++j)
    for (int i = 0; i < coarse.n; ++i) {
      out.x.array()(i, j) = Scalar(0.5) * (ax(2 * i, 2 * j) + ax(2 * i, 2 * j + 1));
      out.y.array()(i, j) = Scalar(0.5) * (ay(2 * i, 2 * j) + ay(2 * i + 1, 2 * j));
    }
  return out;
}

}  // namespace pnpns
