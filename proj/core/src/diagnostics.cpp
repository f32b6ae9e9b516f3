#include "nsf/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "nsf/error.hpp"

namespace nsf {

namespace {

// Neumaier compensated summation.
class Sum {
 public:
  void add(double v) {
    const double t = s_ + v;
    if (std::fabs(s_) >= std::fabs(v)) c_ += (s_ - t) + v;
    else c_ += (v - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

}  // namespace

double total_mass(const FieldState& s) {
  Sum acc;
  for (double r : s.rho) acc.add(r);
  return acc.value() * s.grid.cell_volume();
}

EnergyParts energy_parts(const Problem& p, const FieldState& s) {
  const double delta = p.penalty.delta, beta = p.penalty.beta;
  Sum k, e, a, th;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double r = s.rho[i];
    if (r > 0.0) {
      const double m2 = s.m[3 * i] * s.m[3 * i] + s.m[3 * i + 1] * s.m[3 * i + 1] + s.m[3 * i + 2] * s.m[3 * i + 2];
      k.add(0.5 * m2 / r);
      e.add(r * elastic_potential(p.laws, r));
    }
    a.add(delta * std::pow(r, beta) / (beta - 1.0));
    th.add(s.w[i]);
  }
  const double vol = s.grid.cell_volume();
  return {k.value() * vol, e.value() * vol, a.value() * vol, th.value() * vol};
}

double penalty_integral(const FieldState& s, const GeometryFrame& g, double dt, double accumulator) {
  Sum acc;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    if (!(g.sigma[i] > 0.0)) continue;
    const Vec3 u = cell_velocity(s, g, i);
    double a = 0.0;
    for (int k = 0; k < 3; ++k) a += (u[k] - g.V[3 * i + k]) * g.normal[3 * i + k];
    acc.add(g.sigma[i] * a * a);
  }
  return accumulator + dt * acc.value() * s.grid.cell_volume();
}

double solid_mass(const FieldState& s, const GeometryFrame& g) {
  const double cut = 1.5 * s.grid.h();
  Sum acc;
  for (std::size_t i = 0; i < s.rho.size(); ++i)
    if (g.phi[i] > cut) acc.add(s.rho[i]);
  return acc.value() * s.grid.cell_volume();
}

double energy_residual(const EnergyBudget& b) {
  return (b.E_after - b.E_before) - b.transfer - b.work() + b.delta_dissipation + b.friction_dissipation +
         b.penalty_credit;
}

TestFunction TestFunction::constant() { return {}; }

TestFunction TestFunction::bump(std::string name, const Vec3& center, double r_inner, double r_outer) {
  if (!(r_inner >= 0.0 && r_outer > r_inner))
    throw Error(ErrorKind::InadmissibleTestFunction, "bump radii must satisfy 0 <= inner < outer");
  TestFunction f;
  f.name = std::move(name);
  f.center = center;
  f.r_inner = r_inner;
  f.r_outer = r_outer;
  return f;
}

double TestFunction::value(const Vec3& x) const {
  if (r_inner < 0.0) return 1.0;
  const double r = norm(x - center);
  return 1.0 - smoothstep5((r - r_inner) / (r_outer - r_inner));
}

std::vector<double> TestFunction::sample(const Grid& grid) const {
  std::vector<double> v(grid.cells());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = value(grid.center(i));
  return v;
}

void check_admissible(const std::vector<double>& psi, const GeometryFrame& g, const Grid& grid, double tol) {
  const double h = grid.h();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!(g.sigma[i] > 0.0)) continue;
    double dn = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const std::size_t st = grid.stride(a);
      const int ca = static_cast<int>((i / st) % static_cast<std::size_t>(grid.n));
      const double up = ca < grid.n - 1 ? psi[i + st] : psi[i];
      const double lo = ca > 0 ? psi[i - st] : psi[i];
      dn += (up - lo) / (2.0 * h) * g.normal[3 * i + a];
    }
    if (std::fabs(dn) > tol)
      throw Error(ErrorKind::InadmissibleTestFunction,
                  "normal derivative " + std::to_string(dn) + " on the interface band exceeds tolerance");
  }
}

double thermal_residual(const Problem& p, const FieldState& before, const FieldState& after, const StepRecord& rec,
                        const std::vector<double>& psi) {
  return thermal_residuals(p, before, after, rec, {psi}).front();
}

std::vector<double> thermal_residuals(const Problem& p, const FieldState& before, const FieldState& after,
                                      const StepRecord& rec, const std::vector<std::vector<double>>& psis) {
  if (rec.stage.rho.empty() || rec.frame0.phi.empty())
    throw Error(ErrorKind::EmptyState, "step record carries no stage data");
  const std::vector<double> b0 = thermal_weak_budgets(p, before, rec.frame0, psis);
  const std::vector<double> b1 = thermal_weak_budgets(p, rec.stage, rec.frame1, psis);
  std::vector<double> out(psis.size());
  for (std::size_t k = 0; k < psis.size(); ++k) {
    Sum change;
    for (std::size_t i = 0; i < psis[k].size(); ++i) change.add(psis[k][i] * (after.w[i] - before.w[i]));
    out[k] = 0.5 * rec.dt * (b0[k] + b1[k]) - change.value() * before.grid.cell_volume();
  }
  return out;
}

double renorm_continuity_residual(const Problem& p, const FieldState& before, const FieldState& after,
                                  const StepRecord& rec, double k) {
  if (rec.stage.rho.empty() || rec.frame0.phi.empty())
    throw Error(ErrorKind::EmptyState, "step record carries no stage data");
  auto Tk = [k](double r) { return std::min(r, k); };
  // T_k'(rho) rho - T_k(rho) is zero below the cutoff and -k above it.
  auto defect = [k](double r) { return r > k ? -k : 0.0; };
  const std::vector<double> d0 = velocity_divergence(p, before, rec.frame0);
  const std::vector<double> d1 = velocity_divergence(p, rec.stage, rec.frame1);
  Sum acc;
  for (std::size_t i = 0; i < before.rho.size(); ++i) {
    acc.add(Tk(after.rho[i]) - Tk(before.rho[i]));
    acc.add(0.5 * rec.dt * (defect(before.rho[i]) * d0[i] + defect(rec.stage.rho[i]) * d1[i]));
  }
  return acc.value() * before.grid.cell_volume();
}

double convergence_rate(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) throw Error(ErrorKind::DegenerateSamples, "need at least three samples");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : samples) {
    if (!(x > 0.0) || !(y > 0.0)) throw Error(ErrorKind::DegenerateSamples, "parameters and values must be positive");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = static_cast<double>(samples.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : samples) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (!(sxx > 1e-24)) throw Error(ErrorKind::DegenerateSamples, "parameters must be distinct");
  return sxy / sxx;
}

}  // namespace nsf
