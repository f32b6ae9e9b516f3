#include "nsf/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsf/error.hpp"

namespace nsf {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv_header(std::ostream& os) {
  os << kCsvSchema << '\n'
     << "step,t,total_mass,kinetic_energy,elastic_energy,artificial_energy,thermal_energy,penalty_integral,"
        "solid_mass,energy_residual,thermal_residual,renorm_residual,min_theta,min_rho,repair_mass,repair_thermal,"
        "repair_cells\n";
}

void write_csv_row(std::ostream& os, const DiagnosticsRow& r) {
  os << r.step << ',' << num(r.t) << ',' << num(r.total_mass) << ',' << num(r.energy.kinetic) << ','
     << num(r.energy.elastic) << ',' << num(r.energy.artificial) << ',' << num(r.energy.thermal) << ','
     << num(r.penalty_integral) << ',' << num(r.solid_mass) << ',' << num(r.energy_residual) << ','
     << num(r.thermal_residual) << ',' << num(r.renorm_residual) << ',' << num(r.min_theta) << ','
     << num(r.min_rho) << ',' << num(r.repair.mass_added) << ',' << num(r.repair.thermal_added) << ','
     << r.repair.cells << '\n';
}

std::string series_to_csv(const DiagnosticsSeries& series) {
  std::ostringstream os;
  write_csv_header(os);
  for (const auto& r : series.rows) write_csv_row(os, r);
  return os.str();
}

void write_vtk(std::ostream& os, const FieldState& s, const GeometryFrame& g) {
  const Grid& grid = s.grid;
  const std::size_t N = grid.cells();
  const double h = grid.h();
  os << "# vtk DataFile Version 3.0\n";
  os << "nsf fields t=" << num(s.t) << '\n';
  os << "ASCII\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << grid.n + 1 << ' ' << grid.n + 1 << ' ' << (grid.dim == 3 ? grid.n + 1 : 1) << '\n';
  os << "ORIGIN " << num(-grid.half_width) << ' ' << num(-grid.half_width) << ' '
     << (grid.dim == 3 ? num(-grid.half_width) : std::string("0")) << '\n';
  os << "SPACING " << num(h) << ' ' << num(h) << ' ' << num(h) << '\n';
  os << "CELL_DATA " << N << '\n';
  auto scalars = [&](const char* name, auto&& f) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < N; ++i) os << num(f(i)) << '\n';
  };
  scalars("rho", [&](std::size_t i) { return s.rho[i]; });
  os << "VECTORS u double\n";
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 u = cell_velocity(s, g, i);
    os << num(u[0]) << ' ' << num(u[1]) << ' ' << num(u[2]) << '\n';
  }
  scalars("theta", [&](std::size_t i) { return s.theta[i]; });
  scalars("phi", [&](std::size_t i) { return g.phi[i]; });
  scalars("chi", [&](std::size_t i) { return g.chi[i]; });
}

void write_vtk_file(const std::string& path, const FieldState& s, const GeometryFrame& g) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  write_vtk(out, s, g);
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec || !std::filesystem::is_directory(path))
    throw Error(ErrorKind::IoError, "cannot create directory '" + path + "'");
}

}  // namespace nsf
