#pragma once

// Index conventions for the periodic MAC grid.
//
// Every field family is stored as an N x N Eigen array `values(i, j)`,
// column-major, so the flat index is i + N*j. With origin (x0, y0) and
// spacing h:
//
//   Cell   (i, j)  ->  cell center      (x0 + (i+1/2)h, y0 + (j+1/2)h)
//   EdgeX  (i, j)  ->  east-west edge   (x0 + i h,       y0 + (j+1/2)h)
//   EdgeY  (i, j)  ->  north-south edge (x0 + (i+1/2)h,  y0 + j h)
//
// So EdgeX(i, j) sits between Cell(i-1, j) and Cell(i, j), and EdgeY(i, j)
// between Cell(i, j-1) and Cell(i, j). All index arithmetic wraps modulo N.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include "pnpns/errors.hpp"

namespace pnpns {

struct GridSpec {
  int n = 4;
  double length = 4.0;
  double origin_x = -2.0;
  double origin_y = -2.0;

  GridSpec() = default;
  GridSpec(int n_cells, double len, double ox, double oy)
      : n(n_cells), length(len), origin_x(ox), origin_y(oy) {
    validate();
  }

  /// Square (-L/2, L/2)^2 with N cells per axis.
  static GridSpec centered(int n_cells, double len = 4.0) {
    return GridSpec(n_cells, len, -0.5 * len, -0.5 * len);
  }

  double h() const { return length / n; }
  double area() const { return length * length; }
  int size() const { return n * n; }

  double cell_x(int i) const { return origin_x + (i + 0.5) * h(); }
  double cell_y(int j) const { return origin_y + (j + 0.5) * h(); }
  double node_x(int i) const { return origin_x + i * h(); }
  double node_y(int j) const { return origin_y + j * h(); }

  void validate() const {
    if (n < 4 || n % 2 != 0)
      throw StructuralError("grid: n_cells must be even and >= 4, got " + std::to_string(n));
    if (!(length > 0.0)) throw StructuralError("grid: length must be positive");
  }

  bool operator==(const GridSpec& o) const {
    return n == o.n && length == o.length && origin_x == o.origin_x && origin_y == o.origin_y;
  }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!(a == b))
    throw StructuralError(std::string(where) + ": grid mismatch (" + std::to_string(a.n) +
                          " vs " + std::to_string(b.n) + " cells)");
}

enum class Location { Cell, EdgeX, EdgeY };

inline int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

/// Scalar grid function on one of the three MAC point families.
template <typename Scalar, Location Loc>
class Field {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  static constexpr Location location = Loc;

  Field() = default;
  explicit Field(const GridSpec& grid) : grid_(grid), values_(Array::Zero(grid.n, grid.n)) {}
  Field(const GridSpec& grid, Array values) : grid_(grid), values_(std::move(values)) {
    if (values_.rows() != grid.n || values_.cols() != grid.n)
      throw StructuralError("field: array is " + std::to_string(values_.rows()) + "x" +
                            std::to_string(values_.cols()) + ", expected " +
                            std::to_string(grid.n) + "x" + std::to_string(grid.n));
  }

  static Field constant(const GridSpec& grid, Scalar c) {
    return Field(grid, Array::Constant(grid.n, grid.n, c));
  }

  /// Samples f(x, y) at this family's points.
  template <typename F>
  static Field sample(const GridSpec& grid, F&& f) {
    Field out(grid);
    for (int j = 0; j < grid.n; ++j)
      for (int i = 0; i < grid.n; ++i) out.values_(i, j) = f(x_at(grid, i), y_at(grid, j));
    return out;
  }

  static double x_at(const GridSpec& g, int i) {
    return Loc == Location::EdgeX ? g.node_x(i) : g.cell_x(i);
  }
  static double y_at(const GridSpec& g, int j) {
    return Loc == Location::EdgeY ? g.node_y(j) : g.cell_y(j);
  }

  const GridSpec& grid() const { return grid_; }
  int n() const { return grid_.n; }

  // Periodic access.
  Scalar operator()(int i, int j) const { return values_(wrap(i, grid_.n), wrap(j, grid_.n)); }
  Scalar& operator()(int i, int j) { return values_(wrap(i, grid_.n), wrap(j, grid_.n)); }

  const Array& array() const { return values_; }
  Array& array() { return values_; }

  std::span<const Scalar> flat() const {
    return {values_.data(), static_cast<std::size_t>(values_.size())};
  }

  Scalar min() const { return values_.minCoeff(); }
  Scalar max() const { return values_.maxCoeff(); }

  Field& operator+=(const Field& o) {
    require_same_grid(grid_, o.grid_, "field +=");
    values_ += o.values_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(grid_, o.grid_, "field -=");
    values_ -= o.values_;
    return *this;
  }
  Field& operator*=(Scalar s) {
    values_ *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, Scalar s) { return a *= s; }
  friend Field operator*(Scalar s, Field a) { return a *= s; }
  friend Field operator-(Field a) {
    a.values_ = -a.values_;
    return a;
  }

 private:
  GridSpec grid_;
  Array values_;
};

template <typename Scalar>
using CellFieldT = Field<Scalar, Location::Cell>;
template <typename Scalar>
using EdgeFieldXT = Field<Scalar, Location::EdgeX>;
template <typename Scalar>
using EdgeFieldYT = Field<Scalar, Location::EdgeY>;

using CellField = CellFieldT<double>;
using EdgeFieldX = EdgeFieldXT<double>;
using EdgeFieldY = EdgeFieldYT<double>;

/// Staggered velocity: x-component on east-west edges, y on north-south.
template <typename Scalar>
struct MacVelocityT {
  EdgeFieldXT<Scalar> x;
  EdgeFieldYT<Scalar> y;

  MacVelocityT() = default;
  explicit MacVelocityT(const GridSpec& g) : x(g), y(g) {}
  MacVelocityT(EdgeFieldXT<Scalar> ux, EdgeFieldYT<Scalar> uy) : x(std::move(ux)), y(std::move(uy)) {
    require_same_grid(x.grid(), y.grid(), "velocity");
  }

  const GridSpec& grid() const { return x.grid(); }

  MacVelocityT& operator+=(const MacVelocityT& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  MacVelocityT& operator-=(const MacVelocityT& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  MacVelocityT& operator*=(Scalar s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend MacVelocityT operator+(MacVelocityT a, const MacVelocityT& b) { return a += b; }
  friend MacVelocityT operator-(MacVelocityT a, const MacVelocityT& b) { return a -= b; }
  friend MacVelocityT operator*(MacVelocityT a, Scalar s) { return a *= s; }
  friend MacVelocityT operator*(Scalar s, MacVelocityT a) { return a *= s; }
};

using MacVelocity = MacVelocityT<double>;

/// Deterministic cascade (pairwise) summation.
template <typename Scalar>
Scalar pairwise_sum(std::span<const Scalar> v) {
  constexpr std::size_t kBlock = 8;
  if (v.size() <= kBlock) {
    Scalar s(0);
    for (const auto& x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace pnpns
