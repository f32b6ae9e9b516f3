#include "nsf/case_runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "nsf/io.hpp"

namespace nsf {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void set_param(CaseConfig& c, const std::string& param, double v, bool couple) {
  if (param == "eps") c.penalty.eps = v;
  else if (param == "omega") c.penalty.omega = v;
  else if (param == "nu") c.penalty.nu = v;
  else if (param == "xi") c.penalty.xi = v;
  else if (param == "delta") {
    c.penalty.delta = v;
    if (couple) c.penalty.nu = v * v;
  } else {
    throw Error(ErrorKind::UnknownKey, "unknown sweep parameter '" + param + "'");
  }
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

CaseReport run_case(const CaseConfig& config, const CaseOptions& options) {
  CaseReport rep;
  try {
    const Problem problem = config.to_problem();
    RunOptions ro;
    ro.test_functions = config.monitor.test_functions;
    ro.renorm_cutoff = config.monitor.renorm_k;
    ro.override_hypotheses = config.override_hypotheses;
    std::ofstream csv;
    long rows = 0;
    const double T = config.solver.end_time;
    if (options.write_outputs) {
      ensure_directory(config.output.dir);
      rep.csv_path = config.output.dir + "/diagnostics.csv";
      csv.open(rep.csv_path);
      if (!csv) throw Error(ErrorKind::IoError, "cannot write '" + rep.csv_path + "'");
      write_csv_header(csv);
      ro.on_row = [&](const FieldState& s, const GeometryFrame& g, const DiagnosticsRow& row) {
        write_csv_row(csv, row);
        const bool last = !(s.t < T);
        const bool periodic = config.output.snapshot_every > 0 && rows % config.output.snapshot_every == 0;
        if (rows == 0 || last || periodic) {
          char name[64];
          std::snprintf(name, sizeof name, "/fields_%06ld.vtk", row.step);
          const std::string path = config.output.dir + name;
          if (rep.snapshot_paths.empty() || rep.snapshot_paths.back() != path) {
            write_vtk_file(path, s, g);
            rep.snapshot_paths.push_back(path);
          }
        }
        ++rows;
      };
    }
    rep.result = run(problem, ro);
    if (csv.is_open()) {
      csv.close();
      if (!csv) throw Error(ErrorKind::IoError, "write to '" + rep.csv_path + "' failed");
    }
    const double etol = config.monitor.energy_tol * std::fabs(rep.result.initial_energy);
    const double ttol = config.monitor.thermal_tol * std::fabs(rep.result.initial_thermal_energy);
    std::ostringstream msg;
    if (rep.result.max_energy_residual > etol) {
      rep.gate_passed = false;
      msg << "energy residual " << num(rep.result.max_energy_residual) << " exceeds " << num(etol) << "; ";
    }
    if (!config.monitor.test_functions.empty() && rep.result.max_thermal_residual > ttol) {
      rep.gate_passed = false;
      msg << "thermal residual " << num(rep.result.max_thermal_residual) << " exceeds " << num(ttol) << "; ";
    }
    rep.exit_code = rep.gate_passed ? kExitOk : kExitGate;
    rep.message = rep.gate_passed ? "completed " + std::to_string(rep.result.steps) + " steps" : msg.str();
  } catch (const BlowUpError& e) {
    rep.exit_code = kExitBlowUp;
    rep.gate_passed = false;
    rep.message = e.what();
  } catch (const Error& e) {
    rep.gate_passed = false;
    rep.message = e.what();
    switch (e.kind()) {
      case ErrorKind::IoError: rep.exit_code = kExitIo; break;
      case ErrorKind::HypothesisGate:
      case ErrorKind::InadmissibleTestFunction: rep.exit_code = kExitGate; break;
      default: rep.exit_code = kExitConfig; break;
    }
  }
  return rep;
}

int worker_limit() {
  const char* env = std::getenv("NSF_THREADS");
  if (!env) return 1;
  const int v = std::atoi(env);
  return std::max(1, v);
}

SweepReport sweep(const CaseConfig& config, const std::string& param, const std::vector<double>& values, int threads,
                  bool couple_nu_delta) {
  if (values.size() < 3) throw Error(ErrorKind::DegenerateSamples, "a sweep needs at least three values");
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); }))
    throw Error(ErrorKind::DegenerateSamples, "sweep values are all equal");
  if (!strictly_decreasing(values)) throw Error(ErrorKind::DegenerateSamples, "sweep values must decrease strictly");
  SweepReport rep;
  rep.param = param;
  rep.rows.resize(values.size());
  std::vector<CaseConfig> cases(values.size(), config);
  for (std::size_t i = 0; i < values.size(); ++i) {
    set_param(cases[i], param, values[i], couple_nu_delta);
    rep.rows[i].value = values[i];
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      SweepRow& row = rep.rows[i];
      try {
        const RunResult r = run(cases[i].to_problem(), [&] {
          RunOptions o;
          o.override_hypotheses = cases[i].override_hypotheses;
          return o;
        }());
        const DiagnosticsRow& last = r.series.rows.back();
        row.completed = true;
        row.penalty_integral = last.penalty_integral;
        row.solid_mass = last.solid_mass;
        row.total_mass = last.total_mass;
        row.artificial_energy = last.energy.artificial;
        row.max_energy_residual = r.max_energy_residual;
        row.steps = r.steps;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int nthreads = std::clamp(threads, 1, static_cast<int>(values.size()));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const bool all_done = std::all_of(rep.rows.begin(), rep.rows.end(), [](const SweepRow& r) { return r.completed; });
  if (!all_done) rep.notes.push_back("partial results: some members failed");
  auto slope_of = [&](auto get, double& out, const char* what) {
    std::vector<std::pair<double, double>> s;
    for (const auto& r : rep.rows)
      if (r.completed && get(r) > 0.0) s.emplace_back(r.value, get(r));
    if (s.size() < 3) {
      out = std::nan("");
      rep.notes.push_back(std::string(what) + ": fewer than three positive samples, no slope");
      return;
    }
    out = convergence_rate(s);
  };
  slope_of([](const SweepRow& r) { return r.penalty_integral; }, rep.slope_penalty, "penalty_integral");
  slope_of([](const SweepRow& r) { return r.solid_mass; }, rep.slope_solid, "solid_mass");
  slope_of([](const SweepRow& r) { return r.artificial_energy; }, rep.slope_artificial, "artificial_energy");

  rep.passed = all_done;
  if (all_done && param == "eps") {
    const bool pen_zero =
        std::all_of(rep.rows.begin(), rep.rows.end(), [](const SweepRow& r) { return r.penalty_integral == 0.0; });
    if (pen_zero) {
      rep.notes.push_back("penalty integral vanishes for every value");
    } else {
      bool pen_dec = true, solid_dec = true;
      for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        pen_dec = pen_dec && rep.rows[i].penalty_integral < rep.rows[i - 1].penalty_integral;
        solid_dec = solid_dec && rep.rows[i].solid_mass < rep.rows[i - 1].solid_mass;
      }
      if (!pen_dec) rep.notes.push_back("penalty integral is not strictly decreasing");
      if (!solid_dec) rep.notes.push_back("solid mass is not strictly decreasing");
      const bool slope_ok = std::isfinite(rep.slope_penalty) && rep.slope_penalty >= config.sweep.slope_min;
      if (!slope_ok) rep.notes.push_back("penalty slope below " + num(config.sweep.slope_min));
      rep.passed = pen_dec && solid_dec && slope_ok;
    }
  }
  return rep;
}

std::string SweepReport::to_csv() const {
  std::ostringstream os;
  os << "# nsf-sweep-csv v1\n";
  os << "param,value,status,penalty_integral,solid_mass,total_mass,artificial_energy,max_energy_residual,steps,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << param << ',' << num(r.value) << ',' << (r.completed ? "completed" : "failed") << ',' << num(r.penalty_integral)
       << ',' << num(r.solid_mass) << ',' << num(r.total_mass) << ',' << num(r.artificial_energy) << ','
       << num(r.max_energy_residual) << ',' << r.steps << ',' << err << '\n';
  }
  return os.str();
}

std::string SweepReport::summary() const {
  std::ostringstream os;
  os << "sweep over " << param << ": " << (passed ? "PASS" : "FAIL") << '\n';
  os << "slope(penalty_integral) = " << num(slope_penalty) << '\n';
  os << "slope(solid_mass) = " << num(slope_solid) << '\n';
  os << "slope(artificial_energy) = " << num(slope_artificial) << '\n';
  for (const auto& n : notes) os << "note: " << n << '\n';
  return os.str();
}

}  // namespace nsf
