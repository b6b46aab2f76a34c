#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pnpns/diagnostics.hpp"
#include "pnpns/grid.hpp"
#include "pnpns/scheme.hpp"

namespace pnpns::io {

inline constexpr const char* kTimeSeriesHeader =
    "step,time,e_h,e_total,e_modified,mass_n,mass_p,min_n,min_p,div_u_inf,nonlinear_iters";

/// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_timeseries_header(std::ostream& out);
void write_timeseries_row(std::ostream& out, const TimeSeriesRow& row);

/// Headered CSV with one (i, j, x, y, value) row per grid point.
template <typename Scalar, Location Loc>
void write_field_csv(std::ostream& out, const Field<Scalar, Loc>& f) {
  out << "i,j,x,y,value\n";
  const GridSpec& g = f.grid();
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i)
      out << i << ',' << j << ',' << format_double(Field<Scalar, Loc>::x_at(g, i)) << ','
          << format_double(Field<Scalar, Loc>::y_at(g, j)) << ',' << format_double(f.array()(i, j))
          << '\n';
}

/// Writes step_<k>_{n,p,psi,u,v}.csv into `dir`.
void write_snapshot(const std::filesystem::path& dir, const SchemeState& state);

/// Level-0 fields read from a JSON object with flat arrays "p", "n", "u",
/// "v" and optionally "psi", each of length N^2 in index order i + N*j.
struct InitialFields {
  CellField p, n, psi;
  MacVelocity u;
};
InitialFields read_initial_fields(const std::filesystem::path& path, const GridSpec& grid);

}  // namespace pnpns::io
