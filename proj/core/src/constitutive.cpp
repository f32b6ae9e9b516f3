#include "nsf/constitutive.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "nsf/error.hpp"

namespace nsf {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

bool near_int(double v, int& out) {
  const double r = std::round(v);
  if (std::fabs(v - r) < 1e-12) {
    out = static_cast<int>(r);
    return true;
  }
  return false;
}

// x^e for x >= 0 with shortcuts for small integer and third-integer exponents.
double powx(double x, double e) {
  int k = 0;
  if (near_int(e, k) && k >= 0 && k <= 16) return ipow(x, k);
  if (x == 0.0) return e > 0.0 ? 0.0 : (e == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  if (near_int(3.0 * e, k) && k > 0 && k <= 48) return ipow(std::cbrt(x), k);
  return std::pow(x, e);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class F>
double integrate(F&& f, double a, double b) {
  if (a == b) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-10, &err);
}

void require_nonneg(double v, const char* what) {
  if (!(v >= 0.0)) throw Error(ErrorKind::NegativeInput, std::string(what) + " must be non-negative");
}

}  // namespace

Law Law::zero() { return Law{}; }

Law Law::power(double coef, double exponent) { return power_sum({{coef, exponent}}); }

Law Law::power_sum(std::vector<Term> terms) {
  Law l;
  l.kind_ = Kind::PowerSum;
  l.terms_ = std::move(terms);
  return l;
}

Law Law::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error(ErrorKind::BadConfig, "table law needs at least two (x, y) pairs");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw Error(ErrorKind::BadConfig, "table law abscissae must increase strictly");
  Law l;
  l.kind_ = Kind::Table;
  l.xs_ = std::move(xs);
  l.ys_ = std::move(ys);
  // Fritsch-Carlson monotone slopes.
  const std::size_t n = l.xs_.size();
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (l.ys_[i + 1] - l.ys_[i]) / (l.xs_[i + 1] - l.xs_[i]);
  l.slopes_.assign(n, 0.0);
  l.slopes_[0] = d[0];
  l.slopes_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      l.slopes_[i] = 0.0;
    } else {
      const double h0 = l.xs_[i] - l.xs_[i - 1], h1 = l.xs_[i + 1] - l.xs_[i];
      const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
      l.slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  return l;
}

double Law::value(double x) const {
  if (kind_ == Kind::PowerSum) {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coef * powx(x, t.exponent);
    return s;
  }
  const std::size_t n = xs_.size();
  if (x <= xs_[0]) return ys_[0] + slopes_[0] * (x - xs_[0]);
  if (x >= xs_[n - 1]) return ys_[n - 1] + slopes_[n - 1] * (x - xs_[n - 1]);
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double hh = xs_[i + 1] - xs_[i];
  const double s = (x - xs_[i]) / hh;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * ys_[i] + h10 * hh * slopes_[i] + h01 * ys_[i + 1] + h11 * hh * slopes_[i + 1];
}

double Law::derivative(double x) const {
  if (kind_ == Kind::PowerSum) {
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.exponent == 0.0) continue;
      s += t.coef * t.exponent * powx(x, t.exponent - 1.0);
    }
    return s;
  }
  const std::size_t n = xs_.size();
  if (x <= xs_[0]) return slopes_[0];
  if (x >= xs_[n - 1]) return slopes_[n - 1];
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double hh = xs_[i + 1] - xs_[i];
  const double s = (x - xs_[i]) / hh;
  const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
  return (d00 * ys_[i] + d01 * ys_[i + 1]) / hh + d10 * slopes_[i] + d11 * slopes_[i + 1];
}

std::string Law::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Table) {
    os << "table";
    for (std::size_t i = 0; i < xs_.size(); ++i) os << ' ' << fmt(xs_[i]) << ' ' << fmt(ys_[i]);
    return os.str();
  }
  if (terms_.empty()) return "zero";
  os << (terms_.size() == 1 ? "power-law" : "power-sum");
  for (const auto& t : terms_) os << ' ' << fmt(t.coef) << ' ' << fmt(t.exponent);
  return os.str();
}

bool Law::operator==(const Law& o) const {
  if (kind_ != o.kind_) return false;
  if (kind_ == Kind::Table) return xs_ == o.xs_ && ys_ == o.ys_;
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].coef != o.terms_[i].coef || terms_[i].exponent != o.terms_[i].exponent) return false;
  return true;
}

double pressure(const ConstitutiveSet& set, double rho, double theta) {
  require_nonneg(rho, "density");
  require_nonneg(theta, "temperature");
  return set.p_e.value(rho) + theta * set.p_theta.value(rho);
}

double artificial_pressure(const ConstitutiveSet& set, double rho, double theta, double delta, double beta) {
  require_nonneg(delta, "delta");
  if (!(beta > std::max(4.0, set.gamma))) throw Error(ErrorKind::BadExponent, "beta must exceed max(4, gamma)");
  return pressure(set, rho, theta) + delta * powx(rho, beta);
}

double elastic_potential(const ConstitutiveSet& set, double rho) {
  require_nonneg(rho, "density");
  if (set.p_e.is_power_sum()) {
    double s = 0.0;
    for (const auto& t : set.p_e.terms()) {
      const double e = t.exponent - 1.0;
      if (std::fabs(e) < 1e-14) s += t.coef * std::log(rho);
      else s += t.coef * (powx(rho, e) - 1.0) / e;
    }
    return s;
  }
  return integrate([&](double z) { return set.p_e.value(z) / (z * z); }, 1.0, rho);
}

namespace {
double primitive_from_zero(const Law& law, double x) {
  if (law.is_power_sum()) {
    double s = 0.0;
    for (const auto& t : law.terms()) {
      if (!(t.exponent > -1.0)) throw Error(ErrorKind::BadExponent, "law is not integrable at zero");
      s += t.coef * powx(x, t.exponent + 1.0) / (t.exponent + 1.0);
    }
    return s;
  }
  return integrate([&](double z) { return law.value(z); }, 0.0, x);
}
}  // namespace

double thermal_Q(const ConstitutiveSet& set, double theta) {
  require_nonneg(theta, "temperature");
  return primitive_from_zero(set.c_v, theta);
}

double conductivity_primitive(const ConstitutiveSet& set, double theta) {
  require_nonneg(theta, "temperature");
  return primitive_from_zero(set.kappa, theta);
}

double invert_Q(const ConstitutiveSet& set, double q, double seed) {
  require_nonneg(q, "thermal energy");
  if (q == 0.0) return 0.0;
  const double tol = 1e-12 * std::max(1.0, q);
  const double cv0 = set.c_v.value(0.0);
  double theta = seed >= 0.0 ? seed : (cv0 > 0.0 ? q / cv0 : q);
  // Bracket the root; Q is strictly increasing.
  double lo = 0.0, hi = std::max(theta, 1e-300);
  while (primitive_from_zero(set.c_v, hi) < q) {
    lo = hi;
    hi *= 2.0;
  }
  theta = std::clamp(theta, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = primitive_from_zero(set.c_v, theta) - q;
    if (std::fabs(f) <= tol) return theta;
    if (f > 0.0) hi = theta;
    else lo = theta;
    const double d = set.c_v.value(theta);
    double next = d > 0.0 ? theta - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == theta) return theta;
    theta = next;
  }
  return theta;
}

RenormValues renorm_pair(const ConstitutiveSet& set, double theta, double z) {
  if (!(z > 0.0 && z < 1.0)) throw Error(ErrorKind::BadExponent, "renormalisation exponent must lie in (0,1)");
  require_nonneg(theta, "temperature");
  RenormValues r;
  r.h = std::pow(1.0 + theta, -z);
  if (theta == 0.0) return r;
  r.Q_h = integrate([&](double s) { return set.c_v.value(s) * std::pow(1.0 + s, -z); }, 0.0, theta);
  r.K_h = integrate([&](double s) { return set.kappa.value(s) * std::pow(1.0 + s, -z); }, 0.0, theta);
  return r;
}

Mat3 stress(const Mat3& g, double mu_eff, double eta, int dim) {
  Mat3 s{};
  double div = 0.0;
  for (int a = 0; a < dim; ++a) div += g[a][a];
  const double iso = (eta - mu_eff * 2.0 / dim) * div;
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) s[a][b] = mu_eff * (g[a][b] + g[b][a]);
    s[a][a] += iso;
  }
  return s;
}

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string HypothesisReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks) os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  os << "tightest c in p_theta <= c rho^(gamma/3): " << tightest_c_ptheta << '\n';
  return os.str();
}

HypothesisReport validate_hypotheses(const ConstitutiveSet& set) {
  HypothesisReport rep;
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  constexpr double rel = 1e-12;
  auto le = [&](double a, double b) { return a <= b + rel * std::max(std::fabs(a), std::fabs(b)); };

  std::vector<double> grid;
  for (int i = 0; i <= 240; ++i) grid.push_back(std::pow(10.0, -6.0 + 0.05 * i));

  const double g = set.gamma;
  add("viscosity", set.mu > 0.0 && set.eta >= 0.0 && set.zeta >= 0.0, "mu > 0, eta >= 0, zeta >= 0");
  add("hp1.gamma", g > 1.5, "gamma = " + fmt(g) + " must exceed 3/2");
  add("hp1.p_e_zero", std::fabs(set.p_e.value(0.0)) <= 1e-14, "p_e(0) = " + fmt(set.p_e.value(0.0)));
  {
    bool lower = true, upper = true;
    std::string where;
    for (double r : grid) {
      if (!le(set.a1 * std::pow(r, g - 1.0) - set.b, set.p_e.derivative(r))) {
        if (lower) where += " lower bound fails at rho=" + fmt(r);
        lower = false;
      }
      if (!le(set.p_e.value(r), set.a2 * std::pow(r, g) + set.b)) {
        if (upper) where += " upper bound fails at rho=" + fmt(r);
        upper = false;
      }
    }
    add("hp1.growth", lower && upper, where.empty() ? "a1 rho^(gamma-1) - b <= p_e' and p_e <= a2 rho^gamma + b" : where);
  }
  {
    bool zero = std::fabs(set.p_theta.value(0.0)) <= 1e-14;
    bool mono = set.p_theta.value(grid[0]) >= 0.0 && set.p_theta.value(grid[0]) >= set.p_theta.value(0.0);
    double cmax = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = set.p_theta.value(grid[i]);
      if (v < 0.0) mono = false;
      if (i > 0 && v < set.p_theta.value(grid[i - 1])) mono = false;
      cmax = std::max(cmax, v / std::pow(grid[i], g / 3.0));
    }
    rep.tightest_c_ptheta = cmax;
    add("hp2.p_theta_zero", zero, "p_theta(0) = " + fmt(set.p_theta.value(0.0)));
    add("hp2.monotone", mono, "p_theta non-negative and non-decreasing on sampled densities");
    add("hp2.growth", le(cmax, set.c_ptheta),
        "max p_theta / rho^(gamma/3) = " + fmt(cmax) + " against c = " + fmt(set.c_ptheta));
  }
  const double need = 12.0 * (g - 1.0) / g;
  add("hh1.alpha_min", set.alpha >= 4.0, "alpha = " + fmt(set.alpha) + " must be >= 4");
  add("hh1.exponent", set.alpha >= need - 1e-12,
      "alpha = " + fmt(set.alpha) + " against 12(gamma-1)/gamma = " + fmt(need));
  {
    bool ok = set.k1 > 0.0 && set.k2 >= set.k1;
    std::string where;
    for (double t : grid) {
      const double base = std::pow(t, set.alpha) + 1.0;
      const double k = set.kappa.value(t);
      if (!le(set.k1 * base, k) || !le(k, set.k2 * base)) {
        if (ok) where = " fails at theta=" + fmt(t);
        ok = false;
      }
    }
    add("hh1.sandwich", ok, "k1 (theta^alpha + 1) <= kappa <= k2 (theta^alpha + 1)" + where);
  }
  {
    bool ok = set.c_lower > 0.0 && set.c_upper > set.c_lower;
    std::string where;
    for (double t : grid) {
      const double base = 1.0 + std::pow(t, set.alpha / 2.0 - 1.0);
      const double c = set.c_v.value(t);
      if (!le(set.c_lower * base, c) || !le(c, set.c_upper * base)) {
        if (ok) where = " fails at theta=" + fmt(t);
        ok = false;
      }
    }
    add("hte1.sandwich", ok, "c_lower (1 + theta^(alpha/2-1)) <= c_v <= c_upper (1 + theta^(alpha/2-1))" + where);
  }
  return rep;
}

namespace fast {
double elastic_enthalpy(const ConstitutiveSet& set, double rho) {
  if (set.p_e.is_power_sum()) {
    double s = 0.0;
    for (const auto& t : set.p_e.terms()) {
      const double e = t.exponent - 1.0;
      const double re = powx(rho, e);
      if (std::fabs(e) < 1e-14) s += t.coef * (std::log(rho) + 1.0);
      else s += t.coef * ((re - 1.0) / e + re);
    }
    return s;
  }
  return elastic_potential(set, rho) + (rho > 0.0 ? set.p_e.value(rho) / rho : set.p_e.derivative(0.0));
}
}  // namespace fast

}  // namespace nsf
