#pragma once

#include <functional>
#include <vector>

#include "nsf/diagnostics.hpp"
#include "nsf/solver.hpp"

namespace nsf {

struct RunOptions {
  // Test functions monitored by the thermal residual; empty disables the monitor.
  std::vector<TestFunction> test_functions;
  double renorm_cutoff = 0.0;  // k of T_k; non-positive disables the monitor
  bool override_hypotheses = false;
  // Called after the initial row and after each emitted row.
  std::function<void(const FieldState&, const GeometryFrame&, const DiagnosticsRow&)> on_row;
  // Called after every step with the state before and after it.
  std::function<void(const FieldState&, const FieldState&, const StepRecord&)> on_step;
};

struct RunResult {
  FieldState final_state;
  DiagnosticsSeries series;
  long steps = 0;
  double initial_energy = 0.0;
  double initial_thermal_energy = 0.0;
  double max_energy_residual = 0.0;   // signed maximum over all steps
  double max_thermal_residual = 0.0;  // signed maximum over steps and test functions
  double max_renorm_residual = 0.0;   // largest magnitude
  double min_rho = 0.0;
  double min_theta = 0.0;
};

// Advances the problem to its end time. Throws HypothesisGate when the
// constitutive laws fail validation and no override is given; BlowUpError
// propagates with the offending time.
RunResult run(const Problem& problem, const RunOptions& options = {});

}  // namespace nsf
