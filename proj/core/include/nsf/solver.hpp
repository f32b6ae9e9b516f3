#pragma once

#include <cstddef>
#include <vector>

#include "nsf/constitutive.hpp"
#include "nsf/geometry.hpp"
#include "nsf/grid.hpp"

namespace nsf {

// First-order upwind face density, or a limited (monotonized central) face
// density capped by the entropy-conservative mean. Both are entropy stable.
enum class FluxScheme { Rusanov, Muscl };
// Whether the implicit boundary penalty force carries the density weight.
enum class PenaltyWeighting { Density, Unweighted };
enum class InitialVelocity { Rest, Domain };

struct SolverConfig {
  double cfl = 0.4;
  FluxScheme flux = FluxScheme::Rusanov;
  double end_time = 1.0;
  int output_every = 10;  // steps between diagnostics rows
  PenaltyWeighting weighting = PenaltyWeighting::Density;
  // Density scale below which velocity is relaxed toward V (near-vacuum closure).
  double vacuum_density = 0.05;
  double theta_floor = 1e-8;
  long max_steps = 10'000'000;
};

struct InitialData {
  double rho = 1.0;
  double theta = 0.5;
  InitialVelocity velocity = InitialVelocity::Rest;
  // Optional Gaussian temperature perturbation A exp(-|x-c|^2 / (2 s^2)).
  double theta_bump = 0.0;
  double theta_bump_width = 0.2;
  Vec3 theta_bump_center{0.0, 0.0, 0.0};
  double theta_lower = 1e-6;
  double theta_upper = 1e6;
};

struct Problem {
  Grid grid{2, 64, 2.0};
  ConstitutiveSet laws;
  PenaltyParams penalty;
  MovingDomain domain;
  SolverConfig solver;
  InitialData initial;

  void validate() const;
};

struct RepairLog {
  double mass_added = 0.0;     // integral of density raised to zero
  double thermal_added = 0.0;  // integral of w raised to its floor
  long cells = 0;
};

// Cell-averaged conserved fields. Momentum holds three components per cell.
struct FieldState {
  Grid grid;
  double t = 0.0;
  std::vector<double> rho, m, w, theta;
  RepairLog repair;  // cumulative since the initial data
};

// Velocity m/rho, or V where the density is below 1e-10.
Vec3 cell_velocity(const FieldState& s, const GeometryFrame& g, std::size_t i);
inline constexpr double kRhoFloor = 1e-10;
// Central velocity gradient G[b][a] = d u_b / d x_a at cell i from a 3-per-cell
// velocity array, with no-slip (mirrored) ghosts on the box walls.
Mat3 velocity_gradient(const Grid& grid, const std::vector<double>& u, std::size_t i);

// Everything the energy and thermal monitors need from one time step.
struct EnergyBudget {
  double E_before = 0.0, E_after = 0.0;
  double transfer = 0.0;       // sum m.V at the new level minus the old level
  // Time-integrated V-work, split by origin.
  double work_convective = 0.0;
  double work_pressure = 0.0;
  double work_viscous = 0.0;
  double work_unsteady = 0.0;
  double delta_dissipation = 0.0;     // dt * delta * (S:grad u + theta^(alpha+1))
  double friction_dissipation = 0.0;  // dt * zeta * sigma |(u-V)_tan|^2
  double penalty_credit = 0.0;        // dt/eps * sigma * weight * mismatch^2
  double work() const { return work_convective + work_pressure + work_viscous + work_unsteady; }
};

struct StepRecord {
  double t0 = 0.0;
  double dt = 0.0;
  EnergyBudget energy;
  double penalty_increment = 0.0;  // dt * sum sigma |(u-V).n|^2 h^d after the penalty
  RepairLog repair;                // repairs of this step only
  // Stage data kept when SolverConfig-independent monitors ask for it.
  FieldState stage;
  GeometryFrame frame0, frame1;
};

// Semi-discrete tendencies at one geometry frame.
struct Tendencies {
  std::vector<double> rho, m, w;
  // Work of the explicit momentum tendencies against a reference velocity.
  double work_convective = 0.0, work_pressure = 0.0, work_viscous = 0.0;
  double delta_dissipation = 0.0, friction_dissipation = 0.0;
};

// Full explicit right-hand side; `vref` (3 per cell) selects the velocity the
// work terms are measured against and may be null.
Tendencies evaluate_tendencies(const Problem& p, const FieldState& s, const GeometryFrame& g,
                               const std::vector<double>* vref = nullptr);

std::vector<double> continuity_rhs(const Problem& p, const FieldState& s, const GeometryFrame& g);
std::vector<double> momentum_rhs(const Problem& p, const FieldState& s, const GeometryFrame& g);
std::vector<double> thermal_rhs(const Problem& p, const FieldState& s, const GeometryFrame& g);

// Weak-form thermal budget sum_f F_f (psi_R - psi_L)/h + sum psi * sources,
// integrated over the grid: equals sum psi * thermal_rhs * h^d.
double thermal_weak_budget(const Problem& p, const FieldState& s, const GeometryFrame& g, const std::vector<double>& psi);
// Same budget for several test functions in one sweep over the grid.
std::vector<double> thermal_weak_budgets(const Problem& p, const FieldState& s, const GeometryFrame& g,
                                         const std::vector<std::vector<double>>& psis);

// Central divergence of the cell velocity with no-slip ghost cells.
std::vector<double> velocity_divergence(const Problem& p, const FieldState& s, const GeometryFrame& g);

struct PenaltyResult {
  Vec3 m;
  double mismatch = 0.0;  // (u' - V).n after the update
  double credit = 0.0;    // k * weight * mismatch^2 with k = dt sigma / eps
};
// Pointwise implicit relaxation of the normal velocity toward V.n.
PenaltyResult apply_penalty_implicit(const Vec3& m, double rho, const Vec3& V, const Vec3& n, double sigma, double dt,
                                     double eps, PenaltyWeighting weighting = PenaltyWeighting::Density);

double sound_speed(const Problem& p, double rho, double theta);
double cfl_dt(const Problem& p, const FieldState& s, const GeometryFrame& g);

FieldState apply_initial_data(const Problem& p);

// Recomputes theta from w for every cell.
void recover_temperature(const Problem& p, FieldState& s);
double total_energy(const Problem& p, const FieldState& s);

class Solver {
 public:
  explicit Solver(Problem p);

  FieldState initial_state() const;
  // Advances by one CFL step, never past `t_stop`.
  StepRecord step(FieldState& s, double t_stop, bool keep_stage_data = false);
  const Problem& problem() const { return problem_; }
  const GeometryFrame& frame() const { return tracker_.current(); }

 private:
  void blend(FieldState& s, const GeometryFrame& g) const;
  void axpy_state(FieldState& out, const FieldState& a, double dt, const Tendencies& L) const;

  Problem problem_;
  GeometryTracker tracker_;
};

}  // namespace nsf
