#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nsf/solver.hpp"

namespace nsf {

struct EnergyParts {
  double kinetic = 0.0;
  double elastic = 0.0;     // integral of rho P_e(rho)
  double artificial = 0.0;  // integral of delta rho^beta / (beta - 1)
  double thermal = 0.0;     // integral of (rho + delta) Q(theta)
  double total() const { return kinetic + elastic + artificial + thermal; }
};

struct DiagnosticsRow {
  long step = 0;
  double t = 0.0;
  double total_mass = 0.0;
  EnergyParts energy;
  double penalty_integral = 0.0;
  double solid_mass = 0.0;
  // Largest values seen over the steps since the previous row.
  double energy_residual = 0.0;
  double thermal_residual = 0.0;
  double renorm_residual = 0.0;
  double min_theta = 0.0;
  double min_rho = 0.0;
  RepairLog repair;
};

struct DiagnosticsSeries {
  std::vector<DiagnosticsRow> rows;
};

// Sum of rho h^d with compensated summation.
double total_mass(const FieldState& s);
EnergyParts energy_parts(const Problem& p, const FieldState& s);
// accumulator + dt * sum sigma |(u - V).n|^2 h^d
double penalty_integral(const FieldState& s, const GeometryFrame& g, double dt, double accumulator);
// Mass in cells with phi > 3h/2.
double solid_mass(const FieldState& s, const GeometryFrame& g);
// Signed discrete energy-inequality residual of one step; <= 0 up to round-off for a stable scheme.
double energy_residual(const EnergyBudget& b);

// Time-independent test function built from a smoothstep of the distance to a centre:
// 1 for |x - c| <= r_inner, 0 for |x - c| >= r_outer. r_inner < 0 means the constant 1.
struct TestFunction {
  std::string name = "constant";
  Vec3 center{0.0, 0.0, 0.0};
  double r_inner = -1.0;
  double r_outer = 0.0;

  static TestFunction constant();
  static TestFunction bump(std::string name, const Vec3& center, double r_inner, double r_outer);
  double value(const Vec3& x) const;
  std::vector<double> sample(const Grid& grid) const;
};

// Throws InadmissibleTestFunction when |grad psi . n| exceeds `tol` on the interface band.
void check_admissible(const std::vector<double>& psi, const GeometryFrame& g, const Grid& grid, double tol = 1e-10);

// Discrete thermal balance tested with psi over one step: the budget the
// equation prescribes minus the realised change of w. Needs the stage data.
double thermal_residual(const Problem& p, const FieldState& before, const FieldState& after, const StepRecord& rec,
                        const std::vector<double>& psi);
std::vector<double> thermal_residuals(const Problem& p, const FieldState& before, const FieldState& after,
                                      const StepRecord& rec, const std::vector<std::vector<double>>& psis);

// Residual of the renormalised continuity equation with b = T_k = min(rho, k), tested with 1.
double renorm_continuity_residual(const Problem& p, const FieldState& before, const FieldState& after,
                                  const StepRecord& rec, double k);

// Least-squares slope of log(value) against log(parameter).
double convergence_rate(const std::vector<std::pair<double, double>>& samples);

}  // namespace nsf
