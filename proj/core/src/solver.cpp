#include "nsf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsf/error.hpp"

namespace nsf {

namespace {

double ipow_d(double x, double e) {
  const double r = std::round(e);
  if (std::fabs(e - r) < 1e-12 && r >= 0.0 && r <= 16.0) {
    double v = 1.0;
    for (int i = 0; i < static_cast<int>(r); ++i) v *= x;
    return v;
  }
  return std::pow(x, e);
}

// Monotonized central slope (difference per cell).
double mc_slope(double dm, double dp) {
  if (dm * dp <= 0.0) return 0.0;
  const double a = std::min({2.0 * std::fabs(dm), 0.5 * std::fabs(dm + dp), 2.0 * std::fabs(dp)});
  return dm > 0.0 ? a : -a;
}

// Scratch arrays reused across evaluations; one set per thread.
struct CellData {
  std::vector<double> u, ptot, pt, pb, pip, Q, cs, dk, S, div, sg, slope, Lc, Lp, Lv, Lf;
};

struct FaceSink {
  // Accumulates one weak thermal budget per test function.
  const std::vector<std::vector<double>>* psis = nullptr;
  std::vector<double> budgets;
  void add_face(double F, std::size_t l, std::size_t r) {
    for (std::size_t k = 0; k < budgets.size(); ++k) budgets[k] += F * ((*psis)[k][r] - (*psis)[k][l]);
  }
  void add_cell(double src, std::size_t i) {
    for (std::size_t k = 0; k < budgets.size(); ++k) budgets[k] += (*psis)[k][i] * src;
  }
};

void check_state(const FieldState& s) {
  const std::size_t N = s.grid.cells();
  if (N == 0 || s.rho.size() != N || s.m.size() != 3 * N || s.w.size() != N || s.theta.size() != N)
    throw Error(ErrorKind::EmptyState, "field state is empty or inconsistent with its grid");
}

Tendencies evaluate_impl(const Problem& p, const FieldState& s, const GeometryFrame& g,
                         const std::vector<double>* vref, FaceSink* sink) {
  check_state(s);
  const Grid& grid = s.grid;
  const std::size_t N = grid.cells();
  const int dim = grid.dim;
  const int n = grid.n;
  const double h = grid.h();
  const double vol = grid.cell_volume();
  const ConstitutiveSet& L = p.laws;
  const double delta = p.penalty.delta, beta = p.penalty.beta;
  const bool muscl = p.solver.flux == FluxScheme::Muscl;

  thread_local CellData c;
  c.u.resize(3 * N);
  c.ptot.resize(N);
  c.pt.resize(N);
  c.pb.resize(N);
  c.Q.resize(N);
  c.cs.resize(N);
  c.dk.resize(N);
  if (muscl) c.pip.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 u = cell_velocity(s, g, i);
    for (int a = 0; a < 3; ++a) c.u[3 * i + a] = u[a];
    const double r = s.rho[i], th = s.theta[i];
    c.pb[i] = L.p_e.value(r) + delta * ipow_d(r, beta);
    c.pt[i] = th * L.p_theta.value(r);
    c.ptot[i] = c.pb[i] + c.pt[i];
    c.Q[i] = thermal_Q(L, th);
    c.cs[i] = sound_speed(p, r, th);
    c.dk[i] = g.chi[i] * L.kappa.value(th);
    if (muscl) {
      const double rr = std::max(r, 1e-14);
      c.pip[i] = fast::elastic_enthalpy(L, rr) + delta * beta * ipow_d(rr, beta - 1.0) / (beta - 1.0);
    }
  }

  Tendencies T;
  T.rho.assign(N, 0.0);
  T.w.assign(N, 0.0);
  auto& Lc = c.Lc;
  auto& Lp = c.Lp;
  auto& Lv = c.Lv;
  auto& Lf = c.Lf;
  auto& slope = c.slope;
  for (auto* v : {&Lc, &Lp, &Lv, &Lf}) v->assign(3 * N, 0.0);
  const double ih = 1.0 / h;

  for (int a = 0; a < dim; ++a) {
    const std::size_t st = grid.stride(a);
    if (muscl) {
      slope.assign(N, 0.0);
      for (std::size_t i = 0; i < N; ++i) {
        const int ca = static_cast<int>((i / st) % static_cast<std::size_t>(n));
        const double dm = ca > 0 ? s.rho[i] - s.rho[i - st] : 0.0;
        const double dp = ca < n - 1 ? s.rho[i + st] - s.rho[i] : 0.0;
        slope[i] = mc_slope(dm, dp);
      }
    }
    for (std::size_t i = 0; i < N; ++i) {
      const int ca = static_cast<int>((i / st) % static_cast<std::size_t>(n));
      if (ca == 0) {
        // Wall on the low side: mirrored velocity, zero mass and heat flux.
        const double lam = c.cs[i];
        for (int b = 0; b < dim; ++b) Lc[3 * i + b] += -lam * s.rho[i] * c.u[3 * i + b] * ih;
        Lp[3 * i + a] += c.ptot[i] * ih;
      }
      if (ca == n - 1) {
        const double lam = c.cs[i];
        for (int b = 0; b < dim; ++b) Lc[3 * i + b] -= lam * s.rho[i] * c.u[3 * i + b] * ih;
        Lp[3 * i + a] -= c.ptot[i] * ih;
        continue;
      }
      const std::size_t l = i, r = i + st;
      const double rl = s.rho[l], rr = s.rho[r];
      const double ub = 0.5 * (c.u[3 * l + a] + c.u[3 * r + a]);
      double rs = ub >= 0.0 ? rl : rr;
      if (muscl) {
        const double face = ub >= 0.0 ? rl + 0.5 * slope[l] : rr - 0.5 * slope[r];
        double rec;
        const double jump = rr - rl;
        if (std::fabs(jump) <= 1e-12 * (rl + rr) + 1e-300) {
          rec = 0.5 * (rl + rr);
        } else {
          rec = (c.pb[r] - c.pb[l]) / (c.pip[r] - c.pip[l]);
          rec = std::clamp(rec, std::min(rl, rr), std::max(rl, rr));
        }
        // Keep the face density on the upwind side of the entropy-conservative mean.
        rs = std::clamp(face, std::min(rs, rec), std::max(rs, rec));
      }
      const double Fr = ub * rs;
      const double lam = std::fabs(ub) + std::max(c.cs[l], c.cs[r]);
      const double rmin = std::min(rl, rr);
      const double Fp = 0.5 * (c.ptot[l] + c.ptot[r]);
      for (int b = 0; b < dim; ++b) {
        const double F = Fr * 0.5 * (c.u[3 * l + b] + c.u[3 * r + b]) -
                         0.5 * lam * rmin * (c.u[3 * r + b] - c.u[3 * l + b]);
        Lc[3 * l + b] -= F * ih;
        Lc[3 * r + b] += F * ih;
      }
      Lp[3 * l + a] -= Fp * ih;
      Lp[3 * r + a] += Fp * ih;
      T.rho[l] -= Fr * ih;
      T.rho[r] += Fr * ih;
      const double kl = c.dk[l], kr = c.dk[r];
      const double kf = kl + kr > 0.0 ? 2.0 * kl * kr / (kl + kr) : 0.0;
      const double Fw = Fr * (Fr >= 0.0 ? c.Q[l] : c.Q[r]) - kf * (s.theta[r] - s.theta[l]) * ih;
      T.w[l] -= Fw * ih;
      T.w[r] += Fw * ih;
      if (sink) sink->add_face(Fw * ih * vol, l, r);
    }
  }

  // Velocity gradient, stress and its divergence with mirrored ghosts.
  c.S.assign(9 * N, 0.0);
  c.div.assign(N, 0.0);
  c.sg.assign(N, 0.0);
  const double half_ih = 0.5 * ih;
  for (std::size_t i = 0; i < N; ++i) {
    const Mat3 G = velocity_gradient(grid, c.u, i);
    const Mat3 S = stress(G, L.mu * g.mu_frac[i], L.eta, dim);
    double sg = 0.0, dv = 0.0;
    for (int a = 0; a < dim; ++a) {
      dv += G[a][a];
      for (int b = 0; b < dim; ++b) {
        c.S[9 * i + 3 * a + b] = S[a][b];
        sg += S[a][b] * G[a][b];
      }
    }
    c.div[i] = dv;
    c.sg[i] = sg;
  }
  for (std::size_t i = 0; i < N; ++i) {
    for (int a = 0; a < dim; ++a) {
      const std::size_t st = grid.stride(a);
      const int ca = static_cast<int>((i / st) % static_cast<std::size_t>(n));
      const std::size_t up = ca < n - 1 ? i + st : i;
      const std::size_t dn = ca > 0 ? i - st : i;
      for (int b = 0; b < dim; ++b) Lv[3 * i + b] += (c.S[9 * up + 3 * b + a] - c.S[9 * dn + 3 * b + a]) * half_ih;
    }
  }

  // Thermal sources, friction and the budget integrals.
  const double sink_exp = L.alpha + 1.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double th = s.theta[i];
    const double radiat = ipow_d(th, sink_exp);
    const double src = -c.pt[i] * c.div[i] + (1.0 - delta) * c.sg[i] - delta * radiat;
    T.w[i] += src;
    if (sink) sink->add_cell(src * vol, i);
    T.delta_dissipation += delta * (c.sg[i] + radiat) * vol;
    if (L.zeta > 0.0 && g.sigma[i] > 0.0) {
      Vec3 d{}, nn{};
      for (int a = 0; a < 3; ++a) {
        d[a] = c.u[3 * i + a] - g.V[3 * i + a];
        nn[a] = g.normal[3 * i + a];
      }
      const double dn = dot(d, nn);
      Vec3 tan = d - dn * nn;
      const double coef = L.zeta * g.sigma[i];
      for (int a = 0; a < dim; ++a) Lf[3 * i + a] = -coef * tan[a];
      T.friction_dissipation += coef * dot(tan, tan) * vol;
    }
  }

  T.m.resize(3 * N);
  for (std::size_t k = 0; k < 3 * N; ++k) T.m[k] = Lc[k] + Lp[k] + Lv[k] + Lf[k];
  if (vref) {
    for (std::size_t k = 0; k < 3 * N; ++k) {
      T.work_convective += Lc[k] * (*vref)[k];
      T.work_pressure += Lp[k] * (*vref)[k];
      T.work_viscous += Lv[k] * (*vref)[k];
    }
    T.work_convective *= vol;
    T.work_pressure *= vol;
    T.work_viscous *= vol;
  }
  return T;
}

}  // namespace

void Problem::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::BadConfig, what); };
  if (grid.dim != 2 && grid.dim != 3) bad("grid dimension must be 2 or 3");
  if (!domain.field) bad("moving domain has no velocity field");
  if (std::fabs(grid.half_width - domain.half_width()) > 1e-12) bad("grid must cover the box of half width 2R");
  if (!(solver.cfl > 0.0 && solver.cfl < 1.0)) bad("cfl must lie in (0,1)");
  if (!(solver.end_time >= 0.0)) bad("end time must be non-negative");
  if (solver.output_every < 1) bad("output cadence must be at least one step");
  if (!(solver.vacuum_density > 0.0)) bad("vacuum density must be positive");
  if (!(initial.rho > 0.0)) bad("initial density must be positive");
  if (!(initial.theta_lower > 0.0 && initial.theta_upper >= initial.theta_lower)) bad("temperature bounds are invalid");
  if (!(initial.theta >= 0.0)) bad("initial temperature must be non-negative");
  penalty.validate(laws.gamma);
}

Mat3 velocity_gradient(const Grid& grid, const std::vector<double>& u, std::size_t i) {
  const int n = grid.n;
  const double half_ih = 0.5 / grid.h();
  Mat3 G{};
  for (int a = 0; a < grid.dim; ++a) {
    const std::size_t st = grid.stride(a);
    const int ca = static_cast<int>((i / st) % static_cast<std::size_t>(n));
    for (int b = 0; b < grid.dim; ++b) {
      const double up = ca < n - 1 ? u[3 * (i + st) + b] : -u[3 * i + b];
      const double dn = ca > 0 ? u[3 * (i - st) + b] : -u[3 * i + b];
      G[b][a] = (up - dn) * half_ih;
    }
  }
  return G;
}

Vec3 cell_velocity(const FieldState& s, const GeometryFrame& g, std::size_t i) {
  const double r = s.rho[i];
  if (r > kRhoFloor) return {s.m[3 * i] / r, s.m[3 * i + 1] / r, s.m[3 * i + 2] / r};
  return {g.V[3 * i], g.V[3 * i + 1], g.V[3 * i + 2]};
}

Tendencies evaluate_tendencies(const Problem& p, const FieldState& s, const GeometryFrame& g,
                               const std::vector<double>* vref) {
  return evaluate_impl(p, s, g, vref, nullptr);
}

std::vector<double> continuity_rhs(const Problem& p, const FieldState& s, const GeometryFrame& g) {
  return evaluate_impl(p, s, g, nullptr, nullptr).rho;
}

std::vector<double> momentum_rhs(const Problem& p, const FieldState& s, const GeometryFrame& g) {
  return evaluate_impl(p, s, g, nullptr, nullptr).m;
}

std::vector<double> thermal_rhs(const Problem& p, const FieldState& s, const GeometryFrame& g) {
  return evaluate_impl(p, s, g, nullptr, nullptr).w;
}

double thermal_weak_budget(const Problem& p, const FieldState& s, const GeometryFrame& g,
                           const std::vector<double>& psi) {
  return thermal_weak_budgets(p, s, g, {psi}).front();
}

std::vector<double> thermal_weak_budgets(const Problem& p, const FieldState& s, const GeometryFrame& g,
                                         const std::vector<std::vector<double>>& psis) {
  for (const auto& psi : psis)
    if (psi.size() != s.grid.cells()) throw Error(ErrorKind::EmptyState, "test function size does not match the grid");
  FaceSink sink;
  sink.psis = &psis;
  sink.budgets.assign(psis.size(), 0.0);
  if (!psis.empty()) evaluate_impl(p, s, g, nullptr, &sink);
  return sink.budgets;
}

std::vector<double> velocity_divergence(const Problem&, const FieldState& s, const GeometryFrame& g) {
  check_state(s);
  const Grid& grid = s.grid;
  const std::size_t N = grid.cells();
  std::vector<double> div(N, 0.0);
  const double half_ih = 0.5 / grid.h();
  for (std::size_t i = 0; i < N; ++i) {
    for (int a = 0; a < grid.dim; ++a) {
      const std::size_t st = grid.stride(a);
      const int ca = static_cast<int>((i / st) % static_cast<std::size_t>(grid.n));
      const double ui = cell_velocity(s, g, i)[a];
      const double up = ca < grid.n - 1 ? cell_velocity(s, g, i + st)[a] : -ui;
      const double dn = ca > 0 ? cell_velocity(s, g, i - st)[a] : -ui;
      div[i] += (up - dn) * half_ih;
    }
  }
  return div;
}

PenaltyResult apply_penalty_implicit(const Vec3& m, double rho, const Vec3& V, const Vec3& n, double sigma, double dt,
                                     double eps, PenaltyWeighting weighting) {
  PenaltyResult res;
  res.m = m;
  const Vec3 u = rho > kRhoFloor ? (1.0 / rho) * m : V;
  const double a = dot(u - V, n);
  res.mismatch = a;
  if (!(sigma > 0.0) || a == 0.0) return res;
  const double k = dt * sigma / eps;
  if (weighting == PenaltyWeighting::Density) {
    const double a1 = a / (1.0 + k);
    res.m = m + (rho * (a1 - a)) * n;
    res.mismatch = a1;
    res.credit = k * rho * a1 * a1;
  } else {
    const double a1 = rho * a / (rho + k);
    res.m = m - (k * a1) * n;
    res.mismatch = a1;
    res.credit = k * a1 * a1;
  }
  return res;
}

double sound_speed(const Problem& p, double rho, double theta) {
  const double r = std::max(rho, 1e-6);
  const ConstitutiveSet& L = p.laws;
  const double beta = p.penalty.beta;
  const double c2 = L.p_e.derivative(r) + theta * L.p_theta.derivative(r) +
                    p.penalty.delta * beta * ipow_d(r, beta - 1.0);
  return std::sqrt(std::max(c2, 0.0));
}

double cfl_dt(const Problem& p, const FieldState& s, const GeometryFrame& g) {
  check_state(s);
  const Grid& grid = s.grid;
  const std::size_t N = grid.cells();
  const double h = grid.h();
  const int dim = grid.dim;
  const double delta = p.penalty.delta;
  const double visc_shape = dim == 3 ? 4.0 / 3.0 : 1.0;
  double hyper = 0.0, Dmax = 0.0, umax = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 u = cell_velocity(s, g, i);
    const double un = norm(u);
    const double vn = std::sqrt(g.V[3 * i] * g.V[3 * i] + g.V[3 * i + 1] * g.V[3 * i + 1] + g.V[3 * i + 2] * g.V[3 * i + 2]);
    umax = std::max({umax, un, vn});
    const double r = s.rho[i], th = s.theta[i];
    hyper = std::max(hyper, (un + sound_speed(p, r, th)) / h);
    const double D = g.chi[i] * p.laws.kappa.value(th) / ((r + delta) * p.laws.c_v.value(th));
    // Wide central viscous stencil: its spectral radius is a quarter of the compact one.
    const double Dv = (visc_shape * p.laws.mu * g.mu_frac[i] + p.laws.eta) /
                      (4.0 * std::max(r, p.solver.vacuum_density));
    Dmax = std::max({Dmax, D, Dv});
  }
  double rate = hyper;
  if (Dmax > 0.0) rate = std::max(rate, 2.0 * dim * Dmax / (h * h));
  double dt = rate > 0.0 ? p.solver.cfl / rate : std::numeric_limits<double>::infinity();
  if (umax > 0.0) dt = std::min(dt, h / (4.0 * dim * umax));
  return dt;
}

void recover_temperature(const Problem& p, FieldState& s) {
  const double delta = p.penalty.delta;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double q = std::max(s.w[i] / (s.rho[i] + delta), 0.0);
    s.theta[i] = invert_Q(p.laws, q, s.theta[i] > 0.0 ? s.theta[i] : -1.0);
  }
}

double total_energy(const Problem& p, const FieldState& s) {
  const double delta = p.penalty.delta, beta = p.penalty.beta;
  double e = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double r = s.rho[i];
    double k = 0.0;
    if (r > 0.0) {
      const double m2 = s.m[3 * i] * s.m[3 * i] + s.m[3 * i + 1] * s.m[3 * i + 1] + s.m[3 * i + 2] * s.m[3 * i + 2];
      k = 0.5 * m2 / r;
    }
    const double el = r > 0.0 ? r * elastic_potential(p.laws, r) : 0.0;
    e += k + el + delta * ipow_d(r, beta) / (beta - 1.0) + s.w[i];
  }
  return e * s.grid.cell_volume();
}

FieldState apply_initial_data(const Problem& p) {
  p.validate();
  const Grid& grid = p.grid;
  const std::size_t N = grid.cells();
  const double h = grid.h();
  const double vol = grid.cell_volume();
  FieldState s;
  s.grid = grid;
  s.rho.resize(N);
  s.m.assign(3 * N, 0.0);
  s.w.resize(N);
  s.theta.resize(N);
  double target = 0.0, have = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double phi = p.domain.shape.phi0(grid.center(i));
    if (phi < 0.0) target += p.initial.rho * vol;
    s.rho[i] = p.initial.rho * (1.0 - smoothstep5((phi + 2.0 * h) / (2.0 * h)));
    have += s.rho[i] * vol;
  }
  if (!(have > 0.0)) throw Error(ErrorKind::BadConfig, "initial fluid domain contains no grid cells");
  const double scale = target / have;
  for (auto& r : s.rho) r *= scale;
  const InitialData& ini = p.initial;
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 x = grid.center(i);
    if (ini.velocity == InitialVelocity::Domain) {
      const Vec3 v = evaluate_V(p.domain, 0.0, x);
      for (int a = 0; a < 3; ++a) s.m[3 * i + a] = s.rho[i] * v[a];
    }
    double th = ini.theta;
    if (ini.theta_bump != 0.0) {
      const Vec3 d = x - ini.theta_bump_center;
      th += ini.theta_bump * std::exp(-dot(d, d) / (2.0 * ini.theta_bump_width * ini.theta_bump_width));
    }
    th = std::clamp(th, ini.theta_lower, ini.theta_upper);
    s.theta[i] = th;
    s.w[i] = (s.rho[i] + p.penalty.delta) * thermal_Q(p.laws, th);
  }
  return s;
}

Solver::Solver(Problem p) : problem_((p.validate(), std::move(p))), tracker_(problem_.domain, problem_.grid, problem_.penalty) {}

FieldState Solver::initial_state() const { return apply_initial_data(problem_); }

void Solver::blend(FieldState& s, const GeometryFrame& g) const {
  const double rv = problem_.solver.vacuum_density;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double b = std::max(1.0 - smoothstep5(s.rho[i] / rv), g.solid_blend[i]);
    if (b <= 0.0) continue;
    const Vec3 u = cell_velocity(s, g, i);
    for (int a = 0; a < 3; ++a) s.m[3 * i + a] = s.rho[i] * ((1.0 - b) * u[a] + b * g.V[3 * i + a]);
  }
}

void Solver::axpy_state(FieldState& out, const FieldState& a, double dt, const Tendencies& L) const {
  const std::size_t N = a.rho.size();
  out.grid = a.grid;
  out.rho.resize(N);
  out.w.resize(N);
  out.m.resize(3 * N);
  out.theta = a.theta;
  for (std::size_t i = 0; i < N; ++i) {
    out.rho[i] = a.rho[i] + dt * L.rho[i];
    out.w[i] = a.w[i] + dt * L.w[i];
  }
  for (std::size_t k = 0; k < 3 * N; ++k) out.m[k] = a.m[k] + dt * L.m[k];
}

StepRecord Solver::step(FieldState& s, double t_stop, bool keep_stage_data) {
  const Problem& p = problem_;
  const Grid& grid = s.grid;
  const std::size_t N = grid.cells();
  const double vol = grid.cell_volume();
  const GeometryFrame& G0 = tracker_.current();
  double dt = cfl_dt(p, s, G0);
  if (s.t + dt > t_stop) dt = t_stop - s.t;
  if (!(dt > 0.0)) throw Error(ErrorKind::BadConfig, "time step collapsed to zero");
  const GeometryFrame& G1 = tracker_.peek(dt);

  StepRecord rec;
  rec.t0 = s.t;
  rec.dt = dt;
  std::vector<double> vbar(3 * N);
  for (std::size_t k = 0; k < 3 * N; ++k) vbar[k] = 0.5 * (G0.V[k] + G1.V[k]);

  EnergyBudget& eb = rec.energy;
  eb.E_before = total_energy(p, s);
  double mv0 = 0.0;
  for (std::size_t k = 0; k < 3 * N; ++k) mv0 += s.m[k] * G0.V[k];

  const Tendencies L0 = evaluate_tendencies(p, s, G0, &vbar);
  FieldState u1;
  axpy_state(u1, s, dt, L0);
  blend(u1, G1);
  recover_temperature(p, u1);
  const Tendencies L1 = evaluate_tendencies(p, u1, G1, &vbar);
  FieldState u2;
  axpy_state(u2, u1, dt, L1);
  blend(u2, G1);

  FieldState next;
  next.grid = grid;
  next.rho.resize(N);
  next.w.resize(N);
  next.m.resize(3 * N);
  next.theta = u1.theta;
  next.repair = s.repair;
  for (std::size_t i = 0; i < N; ++i) {
    next.rho[i] = 0.5 * (s.rho[i] + u2.rho[i]);
    next.w[i] = 0.5 * (s.w[i] + u2.w[i]);
  }
  for (std::size_t k = 0; k < 3 * N; ++k) next.m[k] = 0.5 * (s.m[k] + u2.m[k]);

  const double half_dt = 0.5 * dt;
  eb.work_convective = half_dt * (L0.work_convective + L1.work_convective);
  eb.work_pressure = half_dt * (L0.work_pressure + L1.work_pressure);
  eb.work_viscous = half_dt * (L0.work_viscous + L1.work_viscous);
  eb.delta_dissipation = half_dt * (L0.delta_dissipation + L1.delta_dissipation);
  eb.friction_dissipation = half_dt * (L0.friction_dissipation + L1.friction_dissipation);
  double unsteady = 0.0;
  for (std::size_t k = 0; k < 3 * N; ++k) unsteady += 0.5 * (s.m[k] + next.m[k]) * (G1.V[k] - G0.V[k]);
  eb.work_unsteady = unsteady * vol;
  // Sign convention: the V-work of the energy inequality is minus the work of the momentum tendencies.
  eb.work_convective = -eb.work_convective;
  eb.work_pressure = -eb.work_pressure;
  eb.work_viscous = -eb.work_viscous;
  eb.work_unsteady = -eb.work_unsteady;

  // Implicit boundary penalty at the new geometry.
  double credit = 0.0, pen = 0.0;
  const double eps = p.penalty.eps;
  for (std::size_t i = 0; i < N; ++i) {
    const double sig = G1.sigma[i];
    if (!(sig > 0.0)) continue;
    const Vec3 m{next.m[3 * i], next.m[3 * i + 1], next.m[3 * i + 2]};
    const Vec3 V{G1.V[3 * i], G1.V[3 * i + 1], G1.V[3 * i + 2]};
    const Vec3 nn{G1.normal[3 * i], G1.normal[3 * i + 1], G1.normal[3 * i + 2]};
    const PenaltyResult r = apply_penalty_implicit(m, next.rho[i], V, nn, sig, dt, eps, p.solver.weighting);
    for (int a = 0; a < 3; ++a) next.m[3 * i + a] = r.m[a];
    credit += r.credit;
    pen += sig * r.mismatch * r.mismatch;
  }
  eb.penalty_credit = credit * vol;
  rec.penalty_increment = dt * pen * vol;

  // Positivity repair.
  const double delta = p.penalty.delta;
  const double qfloor = thermal_Q(p.laws, p.solver.theta_floor);
  for (std::size_t i = 0; i < N; ++i) {
    if (next.rho[i] < 0.0) {
      rec.repair.mass_added += -next.rho[i] * vol;
      rec.repair.cells += 1;
      next.rho[i] = 0.0;
      for (int a = 0; a < 3; ++a) next.m[3 * i + a] = 0.0;
    }
    const double wf = (next.rho[i] + delta) * qfloor;
    if (next.w[i] < wf) {
      rec.repair.thermal_added += (wf - next.w[i]) * vol;
      rec.repair.cells += 1;
      next.w[i] = wf;
    }
  }
  recover_temperature(p, next);
  for (auto& th : next.theta) th = std::max(th, p.solver.theta_floor);
  next.repair.mass_added += rec.repair.mass_added;
  next.repair.thermal_added += rec.repair.thermal_added;
  next.repair.cells += rec.repair.cells;

  auto bad = [](double v) { return !std::isfinite(v) || std::fabs(v) > 1e12; };
  for (std::size_t i = 0; i < N; ++i)
    if (bad(next.rho[i]) || bad(next.w[i]) || bad(next.theta[i]) || bad(next.m[3 * i]) || bad(next.m[3 * i + 1]) ||
        bad(next.m[3 * i + 2]))
      throw BlowUpError(s.t + dt, "field left the admissible range");

  next.t = s.t + dt;
  eb.E_after = total_energy(p, next);
  double mv1 = 0.0;
  for (std::size_t k = 0; k < 3 * N; ++k) mv1 += next.m[k] * G1.V[k];
  eb.transfer = (mv1 - mv0) * vol;

  if (keep_stage_data) {
    rec.stage = std::move(u1);
    rec.frame0 = G0;
    rec.frame1 = G1;
  }
  tracker_.commit();
  s = std::move(next);
  return rec;
}

}  // namespace nsf
