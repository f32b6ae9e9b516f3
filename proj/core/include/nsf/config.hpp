#pragma once

#include <string>
#include <vector>

#include "nsf/diagnostics.hpp"
#include "nsf/error.hpp"
#include "nsf/solver.hpp"

namespace nsf {

struct FieldSpec {
  std::string name = "rotation";  // rest | translation | rotation | pulsating-disk
  double omega = 1.0;
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 velocity{1.0, 0.0, 0.0};
  double amplitude = 0.2;
  double frequency = 1.0;
  double taper = 0.85;
};

struct OutputSpec {
  std::string dir = "out";
  int snapshot_every = 0;  // rows between field snapshots; 0 writes first and last only
  bool deterministic = true;
};

struct MonitorSpec {
  std::vector<TestFunction> test_functions;
  double renorm_k = 0.0;
  double energy_tol = 1e-8;   // relative to the initial total energy
  double thermal_tol = 1e-8;  // relative to the initial thermal energy
};

struct SweepSpec {
  std::string param;
  std::vector<double> values;
  bool couple_nu_delta = false;
  double slope_min = 0.8;
};

struct CaseConfig {
  std::string name = "case";
  int dim = 2;
  int n = 64;
  double R = 1.0;
  double trace_dt = 1e-3;
  Shape shape;
  FieldSpec field;
  ConstitutiveSet laws;
  PenaltyParams penalty;
  SolverConfig solver;
  InitialData initial;
  OutputSpec output;
  MonitorSpec monitor;
  SweepSpec sweep;
  bool override_hypotheses = false;
  unsigned long seed = 1;

  Problem to_problem() const;
};

struct ConfigIssue {
  int line = 0;
  std::string key;
  std::string reason;
  ErrorKind kind = ErrorKind::ParseError;
};

// Carries every problem found in a config text; kind() is that of the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// `key = value` lines; `#` starts a comment. Unset keys keep their defaults.
CaseConfig parse_config(const std::string& text);
CaseConfig load_config(const std::string& path);
// Canonical text listing every key; parse_config(emit_config(c)) reproduces c.
std::string emit_config(const CaseConfig& c);

std::shared_ptr<VelocityField> make_field(const FieldSpec& spec, double R);

}  // namespace nsf
