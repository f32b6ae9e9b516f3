#include "nsf/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace nsf {

namespace {

struct Issue {
  ErrorKind kind;
  std::string reason;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) throw Issue{ErrorKind::ParseError, "'" + s + "' is not a number"};
  return v;
}

long to_long(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw Issue{ErrorKind::ParseError, "'" + s + "' is not an integer"};
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Issue{ErrorKind::ParseError, "'" + s + "' is not a boolean"};
}

Vec3 to_vec(const std::string& s) {
  const auto w = words(s);
  if (w.size() < 2 || w.size() > 3) throw Issue{ErrorKind::ParseError, "expected two or three numbers"};
  Vec3 v{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < w.size(); ++i) v[i] = to_double(w[i]);
  return v;
}

std::string vec_str(const Vec3& v) { return fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]); }

Law to_law(const std::string& s) {
  const auto w = words(s);
  if (w.empty()) throw Issue{ErrorKind::ParseError, "empty law"};
  if (w[0] == "zero" && w.size() == 1) return Law::zero();
  std::vector<double> nums;
  for (std::size_t i = 1; i < w.size(); ++i) nums.push_back(to_double(w[i]));
  if (w[0] == "power-law") {
    if (nums.size() != 2) throw Issue{ErrorKind::ParseError, "power-law takes a coefficient and an exponent"};
    return Law::power(nums[0], nums[1]);
  }
  if (w[0] == "power-sum") {
    if (nums.empty() || nums.size() % 2) throw Issue{ErrorKind::ParseError, "power-sum takes coefficient/exponent pairs"};
    std::vector<Law::Term> t;
    for (std::size_t i = 0; i < nums.size(); i += 2) t.push_back({nums[i], nums[i + 1]});
    return Law::power_sum(t);
  }
  if (w[0] == "table") {
    if (nums.size() < 4 || nums.size() % 2) throw Issue{ErrorKind::ParseError, "table takes at least two (x, y) pairs"};
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < nums.size(); i += 2) {
      xs.push_back(nums[i]);
      ys.push_back(nums[i + 1]);
    }
    try {
      return Law::table(xs, ys);
    } catch (const Error& e) {
      throw Issue{ErrorKind::RangeError, e.what()};
    }
  }
  throw Issue{ErrorKind::UnknownKey, "unknown law '" + w[0] + "'"};
}

std::vector<TestFunction> to_tests(const std::string& s) {
  std::vector<TestFunction> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto w = words(item);
    if (w.empty()) continue;
    if (w.size() == 1 && w[0] == "constant") {
      out.push_back(TestFunction::constant());
      continue;
    }
    if (w.size() != 6) throw Issue{ErrorKind::ParseError, "test function needs: name cx cy cz r_inner r_outer"};
    const Vec3 c{to_double(w[1]), to_double(w[2]), to_double(w[3])};
    const double ri = to_double(w[4]), ro = to_double(w[5]);
    if (!(ri >= 0.0 && ro > ri)) throw Issue{ErrorKind::RangeError, "test function radii must satisfy 0 <= inner < outer"};
    out.push_back(TestFunction::bump(w[0], c, ri, ro));
  }
  return out;
}

std::string tests_str(const std::vector<TestFunction>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += "; ";
    if (v[i].r_inner < 0.0) s += "constant";
    else s += v[i].name + " " + vec_str(v[i].center) + " " + fmt(v[i].r_inner) + " " + fmt(v[i].r_outer);
  }
  return s;
}

std::vector<double> to_list(const std::string& s) {
  std::string t = s;
  for (auto& ch : t)
    if (ch == ',') ch = ' ';
  std::vector<double> out;
  for (const auto& w : words(t)) out.push_back(to_double(w));
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

void require(bool ok, const std::string& name, const std::string& what) {
  if (!ok) throw Issue{ErrorKind::RangeError, name + " " + what};
}

struct Entry {
  std::string key;
  std::function<void(CaseConfig&, const std::string&)> set;
  std::function<std::string(const CaseConfig&)> get;
};

template <class Get>
Entry real(std::string key, Get ref, std::function<bool(double)> ok, std::string what) {
  const std::string name = key.substr(key.find('.') == std::string::npos ? 0 : key.find('.') + 1);
  return {key,
          [=](CaseConfig& c, const std::string& v) {
            const double x = to_double(v);
            require(ok(x), name, what);
            ref(c) = x;
          },
          [=](const CaseConfig& c) { return fmt(ref(const_cast<CaseConfig&>(c))); }};
}

const std::vector<Entry>& registry() {
  auto pos = [](double x) { return x > 0.0; };
  auto nonneg = [](double x) { return x >= 0.0; };
  auto any = [](double) { return true; };
  auto unit = [](double x) { return x > 0.0 && x <= 1.0; };
  static const std::vector<Entry> reg = {
      {"name", [](CaseConfig& c, const std::string& v) { c.name = v; }, [](const CaseConfig& c) { return c.name; }},
      {"seed", [](CaseConfig& c, const std::string& v) { c.seed = static_cast<unsigned long>(to_long(v)); },
       [](const CaseConfig& c) { return std::to_string(c.seed); }},
      {"grid.dim",
       [](CaseConfig& c, const std::string& v) {
         const long d = to_long(v);
         require(d == 2 || d == 3, "dim", "must be 2 or 3");
         c.dim = static_cast<int>(d);
       },
       [](const CaseConfig& c) { return std::to_string(c.dim); }},
      {"grid.n",
       [](CaseConfig& c, const std::string& v) {
         const long n = to_long(v);
         require(n >= 16 && n <= 4096, "n", "must lie in [16, 4096]");
         c.n = static_cast<int>(n);
       },
       [](const CaseConfig& c) { return std::to_string(c.n); }},
      real("domain.R", [](CaseConfig& c) -> double& { return c.R; }, pos, "must be positive"),
      real("domain.trace_dt", [](CaseConfig& c) -> double& { return c.trace_dt; }, pos, "must be positive"),
      {"domain.shape",
       [](CaseConfig& c, const std::string& v) {
         if (v == "disk") c.shape.kind = Shape::Kind::Disk;
         else if (v == "half-space") c.shape.kind = Shape::Kind::HalfSpace;
         else if (v == "full") c.shape.kind = Shape::Kind::Full;
         else throw Issue{ErrorKind::UnknownKey, "unknown shape '" + v + "'"};
       },
       [](const CaseConfig& c) {
         switch (c.shape.kind) {
           case Shape::Kind::Disk: return std::string("disk");
           case Shape::Kind::HalfSpace: return std::string("half-space");
           case Shape::Kind::Full: return std::string("full");
         }
         return std::string();
       }},
      {"domain.center", [](CaseConfig& c, const std::string& v) { c.shape.center = to_vec(v); },
       [](const CaseConfig& c) { return vec_str(c.shape.center); }},
      real("domain.radius", [](CaseConfig& c) -> double& { return c.shape.radius; }, pos, "must be positive"),
      {"domain.normal",
       [](CaseConfig& c, const std::string& v) {
         const Vec3 n = to_vec(v);
         require(norm(n) > 0.0, "normal", "must be non-zero");
         c.shape.normal = (1.0 / norm(n)) * n;
       },
       [](const CaseConfig& c) { return vec_str(c.shape.normal); }},
      real("domain.offset", [](CaseConfig& c) -> double& { return c.shape.offset; }, any, ""),
      {"field.name",
       [](CaseConfig& c, const std::string& v) {
         if (v != "rest" && v != "translation" && v != "rotation" && v != "pulsating-disk")
           throw Issue{ErrorKind::UnknownKey, "unknown velocity field '" + v + "'"};
         c.field.name = v;
       },
       [](const CaseConfig& c) { return c.field.name; }},
      real("field.omega", [](CaseConfig& c) -> double& { return c.field.omega; }, any, ""),
      {"field.center", [](CaseConfig& c, const std::string& v) { c.field.center = to_vec(v); },
       [](const CaseConfig& c) { return vec_str(c.field.center); }},
      {"field.velocity", [](CaseConfig& c, const std::string& v) { c.field.velocity = to_vec(v); },
       [](const CaseConfig& c) { return vec_str(c.field.velocity); }},
      real("field.amplitude", [](CaseConfig& c) -> double& { return c.field.amplitude; }, any, ""),
      real("field.frequency", [](CaseConfig& c) -> double& { return c.field.frequency; }, nonneg, "must be non-negative"),
      real("field.taper", [](CaseConfig& c) -> double& { return c.field.taper; },
           [](double x) { return x >= 0.0 && x < 1.0; }, "must lie in [0,1)"),
      real("laws.gamma", [](CaseConfig& c) -> double& { return c.laws.gamma; }, pos, "must be positive"),
      real("laws.alpha", [](CaseConfig& c) -> double& { return c.laws.alpha; }, pos, "must be positive"),
      real("laws.mu", [](CaseConfig& c) -> double& { return c.laws.mu; }, pos, "must be positive"),
      real("laws.eta", [](CaseConfig& c) -> double& { return c.laws.eta; }, nonneg, "must be non-negative"),
      real("laws.zeta", [](CaseConfig& c) -> double& { return c.laws.zeta; }, nonneg, "must be non-negative"),
      {"laws.p_e", [](CaseConfig& c, const std::string& v) { c.laws.p_e = to_law(v); },
       [](const CaseConfig& c) { return c.laws.p_e.describe(); }},
      {"laws.p_theta", [](CaseConfig& c, const std::string& v) { c.laws.p_theta = to_law(v); },
       [](const CaseConfig& c) { return c.laws.p_theta.describe(); }},
      {"laws.c_v", [](CaseConfig& c, const std::string& v) { c.laws.c_v = to_law(v); },
       [](const CaseConfig& c) { return c.laws.c_v.describe(); }},
      {"laws.kappa", [](CaseConfig& c, const std::string& v) { c.laws.kappa = to_law(v); },
       [](const CaseConfig& c) { return c.laws.kappa.describe(); }},
      real("laws.a1", [](CaseConfig& c) -> double& { return c.laws.a1; }, pos, "must be positive"),
      real("laws.a2", [](CaseConfig& c) -> double& { return c.laws.a2; }, pos, "must be positive"),
      real("laws.b", [](CaseConfig& c) -> double& { return c.laws.b; }, pos, "must be positive"),
      real("laws.k1", [](CaseConfig& c) -> double& { return c.laws.k1; }, pos, "must be positive"),
      real("laws.k2", [](CaseConfig& c) -> double& { return c.laws.k2; }, pos, "must be positive"),
      real("laws.c_lower", [](CaseConfig& c) -> double& { return c.laws.c_lower; }, pos, "must be positive"),
      real("laws.c_upper", [](CaseConfig& c) -> double& { return c.laws.c_upper; }, pos, "must be positive"),
      real("laws.c_ptheta", [](CaseConfig& c) -> double& { return c.laws.c_ptheta; }, pos, "must be positive"),
      real("penalty.eps", [](CaseConfig& c) -> double& { return c.penalty.eps; }, pos, "must be positive"),
      real("penalty.omega", [](CaseConfig& c) -> double& { return c.penalty.omega; }, unit, "must lie in (0,1]"),
      real("penalty.nu", [](CaseConfig& c) -> double& { return c.penalty.nu; }, unit, "must lie in (0,1]"),
      real("penalty.xi", [](CaseConfig& c) -> double& { return c.penalty.xi; }, pos, "must be positive"),
      real("penalty.delta", [](CaseConfig& c) -> double& { return c.penalty.delta; }, pos, "must be positive"),
      real("penalty.beta", [](CaseConfig& c) -> double& { return c.penalty.beta; }, pos, "must be positive"),
      real("solver.cfl", [](CaseConfig& c) -> double& { return c.solver.cfl; },
           [](double x) { return x > 0.0 && x < 1.0; }, "must lie in (0,1)"),
      {"solver.flux",
       [](CaseConfig& c, const std::string& v) {
         if (v == "rusanov") c.solver.flux = FluxScheme::Rusanov;
         else if (v == "muscl") c.solver.flux = FluxScheme::Muscl;
         else throw Issue{ErrorKind::UnknownKey, "unknown flux scheme '" + v + "'"};
       },
       [](const CaseConfig& c) { return std::string(c.solver.flux == FluxScheme::Muscl ? "muscl" : "rusanov"); }},
      real("solver.end_time", [](CaseConfig& c) -> double& { return c.solver.end_time; }, nonneg, "must be non-negative"),
      {"solver.output_every",
       [](CaseConfig& c, const std::string& v) {
         const long k = to_long(v);
         require(k >= 1, "output_every", "must be at least 1");
         c.solver.output_every = static_cast<int>(k);
       },
       [](const CaseConfig& c) { return std::to_string(c.solver.output_every); }},
      {"solver.penalty_weighting",
       [](CaseConfig& c, const std::string& v) {
         if (v == "density") c.solver.weighting = PenaltyWeighting::Density;
         else if (v == "unweighted") c.solver.weighting = PenaltyWeighting::Unweighted;
         else throw Issue{ErrorKind::UnknownKey, "unknown penalty weighting '" + v + "'"};
       },
       [](const CaseConfig& c) {
         return std::string(c.solver.weighting == PenaltyWeighting::Density ? "density" : "unweighted");
       }},
      real("solver.vacuum_density", [](CaseConfig& c) -> double& { return c.solver.vacuum_density; }, pos,
           "must be positive"),
      real("solver.theta_floor", [](CaseConfig& c) -> double& { return c.solver.theta_floor; }, pos, "must be positive"),
      {"solver.max_steps",
       [](CaseConfig& c, const std::string& v) {
         const long k = to_long(v);
         require(k >= 1, "max_steps", "must be at least 1");
         c.solver.max_steps = k;
       },
       [](const CaseConfig& c) { return std::to_string(c.solver.max_steps); }},
      real("initial.rho", [](CaseConfig& c) -> double& { return c.initial.rho; }, pos, "must be positive"),
      real("initial.theta", [](CaseConfig& c) -> double& { return c.initial.theta; }, nonneg, "must be non-negative"),
      {"initial.velocity",
       [](CaseConfig& c, const std::string& v) {
         if (v == "rest") c.initial.velocity = InitialVelocity::Rest;
         else if (v == "domain") c.initial.velocity = InitialVelocity::Domain;
         else throw Issue{ErrorKind::UnknownKey, "unknown initial velocity '" + v + "'"};
       },
       [](const CaseConfig& c) { return std::string(c.initial.velocity == InitialVelocity::Rest ? "rest" : "domain"); }},
      real("initial.theta_bump", [](CaseConfig& c) -> double& { return c.initial.theta_bump; }, any, ""),
      real("initial.theta_bump_width", [](CaseConfig& c) -> double& { return c.initial.theta_bump_width; }, pos,
           "must be positive"),
      {"initial.theta_bump_center", [](CaseConfig& c, const std::string& v) { c.initial.theta_bump_center = to_vec(v); },
       [](const CaseConfig& c) { return vec_str(c.initial.theta_bump_center); }},
      real("initial.theta_lower", [](CaseConfig& c) -> double& { return c.initial.theta_lower; }, pos, "must be positive"),
      real("initial.theta_upper", [](CaseConfig& c) -> double& { return c.initial.theta_upper; }, pos, "must be positive"),
      {"output.dir", [](CaseConfig& c, const std::string& v) { c.output.dir = v; },
       [](const CaseConfig& c) { return c.output.dir; }},
      {"output.snapshot_every",
       [](CaseConfig& c, const std::string& v) {
         const long k = to_long(v);
         require(k >= 0, "snapshot_every", "must be non-negative");
         c.output.snapshot_every = static_cast<int>(k);
       },
       [](const CaseConfig& c) { return std::to_string(c.output.snapshot_every); }},
      {"output.deterministic", [](CaseConfig& c, const std::string& v) { c.output.deterministic = to_bool(v); },
       [](const CaseConfig& c) { return std::string(c.output.deterministic ? "true" : "false"); }},
      {"monitor.test_functions", [](CaseConfig& c, const std::string& v) { c.monitor.test_functions = to_tests(v); },
       [](const CaseConfig& c) { return tests_str(c.monitor.test_functions); }},
      real("monitor.renorm_k", [](CaseConfig& c) -> double& { return c.monitor.renorm_k; }, nonneg,
           "must be non-negative"),
      real("monitor.energy_tol", [](CaseConfig& c) -> double& { return c.monitor.energy_tol; }, pos, "must be positive"),
      real("monitor.thermal_tol", [](CaseConfig& c) -> double& { return c.monitor.thermal_tol; }, pos,
           "must be positive"),
      {"sweep.param",
       [](CaseConfig& c, const std::string& v) {
         if (!v.empty() && v != "eps" && v != "omega" && v != "nu" && v != "xi" && v != "delta")
           throw Issue{ErrorKind::UnknownKey, "unknown sweep parameter '" + v + "'"};
         c.sweep.param = v;
       },
       [](const CaseConfig& c) { return c.sweep.param; }},
      {"sweep.values",
       [](CaseConfig& c, const std::string& v) {
         c.sweep.values = to_list(v);
         for (double x : c.sweep.values) require(x > 0.0, "values", "must be positive");
       },
       [](const CaseConfig& c) { return list_str(c.sweep.values); }},
      {"sweep.couple_nu_delta", [](CaseConfig& c, const std::string& v) { c.sweep.couple_nu_delta = to_bool(v); },
       [](const CaseConfig& c) { return std::string(c.sweep.couple_nu_delta ? "true" : "false"); }},
      real("sweep.slope_min", [](CaseConfig& c) -> double& { return c.sweep.slope_min; }, any, ""),
      {"hypotheses.override", [](CaseConfig& c, const std::string& v) { c.override_hypotheses = to_bool(v); },
       [](const CaseConfig& c) { return std::string(c.override_hypotheses ? "true" : "false"); }},
  };
  return reg;
}

std::string describe_issues(const std::vector<ConfigIssue>& issues) {
  std::string s;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) s += "\n";
    s += "line " + std::to_string(issues[i].line) + ", key '" + issues[i].key + "': " + issues[i].reason;
  }
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(issues.empty() ? ErrorKind::ParseError : issues.front().kind, describe_issues(issues)),
      issues_(std::move(issues)) {}

std::shared_ptr<VelocityField> make_field(const FieldSpec& f, double R) {
  if (f.name == "rest") return make_rest_field(R);
  if (f.name == "translation") return make_translation_field(R, f.velocity, f.taper);
  if (f.name == "rotation") return make_rotation_field(R, f.omega, f.center, f.taper);
  if (f.name == "pulsating-disk") return make_pulsating_field(R, f.amplitude, f.frequency, f.center, f.taper);
  throw Error(ErrorKind::UnknownKey, "unknown velocity field '" + f.name + "'");
}

Problem CaseConfig::to_problem() const {
  Problem p;
  p.grid = Grid(dim, n, 2.0 * R);
  p.laws = laws;
  p.penalty = penalty;
  p.domain.field = make_field(field, R);
  p.domain.shape = shape;
  p.domain.R = R;
  p.domain.trace_dt = trace_dt;
  p.solver = solver;
  p.initial = initial;
  return p;
}

CaseConfig parse_config(const std::string& text) {
  CaseConfig c;
  std::vector<ConfigIssue> issues;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  const auto& reg = registry();
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({lineno, "", "expected 'key = value'", ErrorKind::ParseError});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Entry* entry = nullptr;
    for (const auto& e : reg)
      if (e.key == key) entry = &e;
    if (!entry) {
      issues.push_back({lineno, key, "unknown key", ErrorKind::UnknownKey});
      continue;
    }
    try {
      entry->set(c, value);
    } catch (const Issue& e) {
      issues.push_back({lineno, key, e.reason, e.kind});
    }
  }
  if (issues.empty()) {
    // Cross-key constraints.
    if (!(c.penalty.beta > std::max(4.0, c.laws.gamma)))
      issues.push_back({0, "penalty.beta", "beta must exceed max(4, gamma)", ErrorKind::RangeError});
    if (c.initial.theta_upper < c.initial.theta_lower)
      issues.push_back({0, "initial.theta_upper", "must not be below theta_lower", ErrorKind::RangeError});
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

CaseConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const CaseConfig& c) {
  std::string out;
  for (const auto& e : registry()) out += e.key + " = " + e.get(c) + "\n";
  return out;
}

}  // namespace nsf
