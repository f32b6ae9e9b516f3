#include "nsf/run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsf/error.hpp"

namespace nsf {

namespace {

DiagnosticsRow make_row(const Problem& p, const FieldState& s, const GeometryFrame& g, long step, double pen) {
  DiagnosticsRow row;
  row.step = step;
  row.t = s.t;
  row.total_mass = total_mass(s);
  row.energy = energy_parts(p, s);
  row.penalty_integral = pen;
  row.solid_mass = solid_mass(s, g);
  row.min_theta = *std::min_element(s.theta.begin(), s.theta.end());
  row.min_rho = *std::min_element(s.rho.begin(), s.rho.end());
  row.repair = s.repair;
  return row;
}

}  // namespace

RunResult run(const Problem& problem, const RunOptions& options) {
  if (!options.override_hypotheses) {
    const HypothesisReport rep = validate_hypotheses(problem.laws);
    if (!rep.all_passed()) throw Error(ErrorKind::HypothesisGate, "constitutive hypotheses failed:\n" + rep.to_text());
  }
  Solver solver(problem);
  FieldState state = solver.initial_state();
  const Grid& grid = problem.grid;

  std::vector<std::vector<double>> psis;
  for (const auto& tf : options.test_functions) {
    psis.push_back(tf.sample(grid));
    check_admissible(psis.back(), solver.frame(), grid);
  }
  const bool keep = !psis.empty() || options.renorm_cutoff > 0.0;

  RunResult res;
  res.initial_energy = total_energy(problem, state);
  res.initial_thermal_energy = energy_parts(problem, state).thermal;
  res.max_energy_residual = -std::numeric_limits<double>::infinity();
  res.max_thermal_residual = -std::numeric_limits<double>::infinity();
  res.min_rho = *std::min_element(state.rho.begin(), state.rho.end());
  res.min_theta = *std::min_element(state.theta.begin(), state.theta.end());

  double pen = 0.0;
  DiagnosticsRow first = make_row(problem, state, solver.frame(), 0, pen);
  res.series.rows.push_back(first);
  if (options.on_row) options.on_row(state, solver.frame(), first);

  const double T = problem.solver.end_time;
  const int every = problem.solver.output_every;
  long step = 0;
  double er = -std::numeric_limits<double>::infinity();
  double tr = -std::numeric_limits<double>::infinity();
  double rr = 0.0;
  while (state.t < T) {
    if (step >= problem.solver.max_steps) throw Error(ErrorKind::BadConfig, "step limit reached before the end time");
    FieldState before;
    if (keep || options.on_step) before = state;
    const StepRecord rec = solver.step(state, T, keep);
    ++step;
    pen += rec.penalty_increment;
    const double e = energy_residual(rec.energy);
    er = std::max(er, e);
    res.max_energy_residual = std::max(res.max_energy_residual, e);
    if (!psis.empty()) {
      for (const auto& psi : psis) check_admissible(psi, rec.frame1, grid);
      for (const double t : thermal_residuals(problem, before, state, rec, psis)) {
        tr = std::max(tr, t);
        res.max_thermal_residual = std::max(res.max_thermal_residual, t);
      }
    }
    if (options.renorm_cutoff > 0.0) {
      const double r = renorm_continuity_residual(problem, before, state, rec, options.renorm_cutoff);
      rr = std::max(rr, std::fabs(r));
      res.max_renorm_residual = std::max(res.max_renorm_residual, std::fabs(r));
    }
    res.min_rho = std::min(res.min_rho, *std::min_element(state.rho.begin(), state.rho.end()));
    res.min_theta = std::min(res.min_theta, *std::min_element(state.theta.begin(), state.theta.end()));
    if (options.on_step) options.on_step(before, state, rec);
    if (step % every == 0 || !(state.t < T)) {
      DiagnosticsRow row = make_row(problem, state, solver.frame(), step, pen);
      row.energy_residual = er;
      row.thermal_residual = psis.empty() ? 0.0 : tr;
      row.renorm_residual = rr;
      res.series.rows.push_back(row);
      if (options.on_row) options.on_row(state, solver.frame(), row);
      er = tr = -std::numeric_limits<double>::infinity();
      rr = 0.0;
    }
  }
  if (step == 0) {
    res.max_energy_residual = 0.0;
    res.max_thermal_residual = 0.0;
  } else if (psis.empty()) {
    res.max_thermal_residual = 0.0;
  }
  res.steps = step;
  res.final_state = std::move(state);
  return res;
}

}  // namespace nsf
