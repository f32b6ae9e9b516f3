#pragma once

#include <ostream>
#include <string>

#include "nsf/diagnostics.hpp"
#include "nsf/geometry.hpp"
#include "nsf/solver.hpp"

namespace nsf {

inline constexpr const char* kCsvSchema = "# nsf-diagnostics-csv v1";

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const DiagnosticsRow& row);
std::string series_to_csv(const DiagnosticsSeries& series);

// Legacy ASCII structured-points file with cell arrays rho, u, theta, phi, chi.
void write_vtk(std::ostream& os, const FieldState& s, const GeometryFrame& g);
void write_vtk_file(const std::string& path, const FieldState& s, const GeometryFrame& g);

// Creates the directory (and parents); throws IoError on failure.
void ensure_directory(const std::string& path);

}  // namespace nsf
