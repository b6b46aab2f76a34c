#include "pnpns/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace pnpns::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_timeseries_header(std::ostream& out) { out << kTimeSeriesHeader << '\n'; }

void write_timeseries_row(std::ostream& out, const TimeSeriesRow& r) {
  out << r.step << ',' << format_double(r.time) << ',' << format_double(r.e_h) << ','
      << format_double(r.e_total) << ',' << format_double(r.e_modified) << ','
      << format_double(r.mass_n) << ',' << format_double(r.mass_p) << ','
      << format_double(r.min_n) << ',' << format_double(r.min_p) << ','
      << format_double(r.div_u_inf) << ',' << r.nonlinear_iters << '\n';
}

void write_snapshot(const std::filesystem::path& dir, const SchemeState& state) {
  std::filesystem::create_directories(dir);
  char stem[32];
  std::snprintf(stem, sizeof(stem), "step_%06d_", state.step_index);
  auto open = [&](const char* name) {
    std::ofstream out(dir / (std::string(stem) + name + ".csv"));
    if (!out) throw Error("cannot write snapshot into " + dir.string());
    return out;
  };
  {
    auto out = open("n");
    write_field_csv(out, state.n_curr);
  }
  {
    auto out = open("p");
    write_field_csv(out, state.p_curr);
  }
  {
    auto out = open("psi");
    write_field_csv(out, state.psi_curr);
  }
  {
    auto out = open("u");
    write_field_csv(out, state.u_curr.x);
  }
  {
    auto out = open("v");
    write_field_csv(out, state.u_curr.y);
  }
}

namespace {

template <Location Loc>
Field<double, Loc> field_from_json(const nlohmann::json& doc, const char* key, const GridSpec& g,
                                   bool required) {
  Field<double, Loc> f(g);
  if (!doc.contains(key)) {
    if (required) throw StructuralError(std::string("initial condition file: missing array '") + key + "'");
    return f;
  }
  const auto& arr = doc.at(key);
  if (!arr.is_array()) throw StructuralError(std::string("initial condition file: '") + key + "' is not an array");
  if (arr.size() != static_cast<std::size_t>(g.size()))
    throw StructuralError(std::string("initial condition file: array '") + key + "' has " +
                          std::to_string(arr.size()) + " entries, expected N^2 = " +
                          std::to_string(g.size()));
  for (int k = 0; k < g.size(); ++k) f.array().data()[k] = arr[k].get<double>();
  return f;
}

}  // namespace

InitialFields read_initial_fields(const std::filesystem::path& path, const GridSpec& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open initial condition file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("initial condition file '" + path.string() + "': " + e.what());
  }
  InitialFields out{field_from_json<Location::Cell>(doc, "p", grid, true),
                    field_from_json<Location::Cell>(doc, "n", grid, true),
                    field_from_json<Location::Cell>(doc, "psi", grid, false),
                    MacVelocity(field_from_json<Location::EdgeX>(doc, "u", grid, true),
                                field_from_json<Location::EdgeY>(doc, "v", grid, true))};
  return out;
}

}  // namespace pnpns::io
