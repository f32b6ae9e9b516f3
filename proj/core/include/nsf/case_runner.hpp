#pragma once

#include <string>
#include <vector>

#include "nsf/config.hpp"
#include "nsf/run.hpp"

namespace nsf {

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitGate = 2, kExitBlowUp = 3, kExitConfig = 4 };

struct CaseReport {
  int exit_code = kExitOk;
  std::string message;
  bool gate_passed = true;
  RunResult result;
  std::string csv_path;
  std::vector<std::string> snapshot_paths;
};

struct CaseOptions {
  bool write_outputs = true;
};

// Runs one case, writes diagnostics.csv and field snapshots under
// config.output.dir, and maps failures to exit codes.
CaseReport run_case(const CaseConfig& config, const CaseOptions& options = {});

struct SweepRow {
  double value = 0.0;
  bool completed = false;
  std::string error;
  double penalty_integral = 0.0;
  double solid_mass = 0.0;
  double total_mass = 0.0;
  double artificial_energy = 0.0;
  double max_energy_residual = 0.0;
  long steps = 0;
};

struct SweepReport {
  std::string param;
  std::vector<SweepRow> rows;
  double slope_penalty = 0.0;
  double slope_solid = 0.0;
  double slope_artificial = 0.0;
  bool passed = false;
  std::vector<std::string> notes;

  std::string to_csv() const;
  std::string summary() const;
};

// Worker count from NSF_THREADS (default 1, never below 1).
int worker_limit();

// Runs the case once per value of `param` (strictly decreasing, at least
// three values). Members run on up to `threads` workers; rows keep value order.
SweepReport sweep(const CaseConfig& config, const std::string& param, const std::vector<double>& values,
                  int threads = 1, bool couple_nu_delta = false);

}  // namespace nsf
