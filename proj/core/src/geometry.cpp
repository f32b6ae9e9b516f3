#include "nsf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsf/error.hpp"

namespace nsf {

double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

double VelocityField::taper(const Vec3& x) const {
  const double r = norm(x);
  const double r0 = taper_start_ * R_;
  if (r <= r0) return 1.0;
  if (r >= R_) return 0.0;
  return 1.0 - smoothstep5((r - r0) / (R_ - r0));
}

namespace {

class RestField final : public VelocityField {
 public:
  explicit RestField(double R) : VelocityField(R, 1.0) {}
  Vec3 value(double, const Vec3&) const override { return {0.0, 0.0, 0.0}; }
  std::string name() const override { return "rest"; }
};

class TranslationField final : public VelocityField {
 public:
  TranslationField(double R, const Vec3& c, double ts) : VelocityField(R, ts), c_(c) {}
  Vec3 value(double, const Vec3& x) const override { return taper(x) * c_; }
  std::string name() const override { return "translation"; }

 private:
  Vec3 c_;
};

class RotationField final : public VelocityField {
 public:
  RotationField(double R, double omega, const Vec3& c, double ts) : VelocityField(R, ts), omega_(omega), c_(c) {}
  Vec3 value(double, const Vec3& x) const override {
    const double s = omega_ * taper(x);
    return {-s * (x[1] - c_[1]), s * (x[0] - c_[0]), 0.0};
  }
  std::string name() const override { return "rotation"; }

 private:
  double omega_;
  Vec3 c_;
};

class PulsatingField final : public VelocityField {
 public:
  PulsatingField(double R, double a, double f, const Vec3& c, double ts)
      : VelocityField(R, ts), a_(a), f_(f), c_(c) {}
  Vec3 value(double t, const Vec3& x) const override {
    const double s = a_ * std::sin(2.0 * std::numbers::pi * f_ * t) * taper(x);
    return s * (x - c_);
  }
  std::string name() const override { return "pulsating-disk"; }

 private:
  double a_, f_;
  Vec3 c_;
};

}  // namespace

std::shared_ptr<VelocityField> make_rest_field(double R) { return std::make_shared<RestField>(R); }
std::shared_ptr<VelocityField> make_translation_field(double R, const Vec3& c, double ts) {
  return std::make_shared<TranslationField>(R, c, ts);
}
std::shared_ptr<VelocityField> make_rotation_field(double R, double omega, const Vec3& center, double ts) {
  return std::make_shared<RotationField>(R, omega, center, ts);
}
std::shared_ptr<VelocityField> make_pulsating_field(double R, double a, double f, const Vec3& center, double ts) {
  return std::make_shared<PulsatingField>(R, a, f, center, ts);
}

Shape Shape::disk(const Vec3& center, double radius) {
  Shape s;
  s.kind = Kind::Disk;
  s.center = center;
  s.radius = radius;
  return s;
}

Shape Shape::half_space(const Vec3& normal, double offset) {
  Shape s;
  s.kind = Kind::HalfSpace;
  const double l = norm(normal);
  s.normal = (1.0 / l) * normal;
  s.offset = offset;
  return s;
}

Shape Shape::full() {
  Shape s;
  s.kind = Kind::Full;
  return s;
}

double Shape::phi0(const Vec3& x) const {
  switch (kind) {
    case Kind::Disk: return norm(x - center) - radius;
    case Kind::HalfSpace: return dot(normal, x) - offset;
    case Kind::Full: return -1e3;
  }
  return 0.0;
}

void PenaltyParams::validate(double gamma) const {
  auto bad = [](const char* name, const char* why) {
    throw Error(ErrorKind::RangeError, std::string(name) + " " + why);
  };
  if (!(eps > 0.0)) bad("eps", "must be positive");
  if (!(omega > 0.0 && omega <= 1.0)) bad("omega", "must lie in (0,1]");
  if (!(nu > 0.0 && nu <= 1.0)) bad("nu", "must lie in (0,1]");
  if (!(xi > 0.0)) bad("xi", "must be positive");
  if (!(delta > 0.0)) bad("delta", "must be positive");
  if (!(beta > std::max(4.0, gamma))) bad("beta", "must exceed max(4, gamma)");
}

Vec3 evaluate_V(const MovingDomain& d, double t, const Vec3& x) {
  if (norm(x) > d.R) return {0.0, 0.0, 0.0};
  return d.field->value(t, x);
}

Vec3 advance_point(const MovingDomain& d, const Vec3& x, double t, double dt) {
  if (norm(x) > d.R) return x;
  const Vec3 k1 = evaluate_V(d, t, x);
  const Vec3 k2 = evaluate_V(d, t + 0.5 * dt, x + (0.5 * dt) * k1);
  const Vec3 k3 = evaluate_V(d, t + 0.5 * dt, x + (0.5 * dt) * k2);
  const Vec3 k4 = evaluate_V(d, t + dt, x + dt * k3);
  Vec3 r;
  for (int a = 0; a < 3; ++a) r[a] = x[a] + dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
  return r;
}

std::vector<Vec3> advance_flow_map(const MovingDomain& d, const std::vector<Vec3>& X, double t, double dt) {
  std::vector<Vec3> out(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = advance_point(d, X[i], t, dt);
  return out;
}

double level_set(const MovingDomain& d, double t, const Vec3& x) {
  if (t <= 0.0) return d.shape.phi0(x);
  const int steps = std::max(1, static_cast<int>(std::ceil(t / d.trace_dt - 1e-12)));
  const double ds = t / steps;
  Vec3 y = x;
  for (int s = steps; s > 0; --s) y = advance_point(d, y, s * ds, -ds);
  return d.shape.phi0(y);
}

namespace {

// 1 at s <= 0, floor at s >= 1, exact at both ends and never below the floor.
double ramp_down(double s, double floor) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return floor;
  return std::max(floor, 1.0 - (1.0 - floor) * smoothstep5(s));
}

}  // namespace

double chi_profile(double phi, double nu, double xi) { return ramp_down(0.5 * (phi / xi + 1.0), nu); }

double viscosity_fraction(double phi, double omega, double width) { return ramp_down(phi / width, omega); }

double delta_profile(double phi, double h) {
  const double w = 3.0 * h;
  if (std::fabs(phi) >= 0.5 * w) return 0.0;
  return (1.0 + std::cos(2.0 * std::numbers::pi * phi / w)) / w;
}

double chi_nu(const MovingDomain& d, double t, const Vec3& x, double nu) {
  return level_set(d, t, x) < 0.0 ? 1.0 : nu;
}

double chi_nu_xi(const MovingDomain& d, double t, const Vec3& x, double nu, double xi) {
  return chi_profile(level_set(d, t, x), nu, xi);
}

double chi_nu_xi_reference(const MovingDomain& d, double t, const Vec3& x, double nu, double xi, int dim,
                           int samples) {
  double num = 0.0, den = 0.0;
  const double step = 2.0 * xi / samples;
  const int kz = dim == 3 ? samples : 1;
  for (int k = 0; k < kz; ++k)
    for (int j = 0; j < samples; ++j)
      for (int i = 0; i < samples; ++i) {
        Vec3 y{-xi + (i + 0.5) * step, -xi + (j + 0.5) * step, dim == 3 ? -xi + (k + 0.5) * step : 0.0};
        const double r2 = dot(y, y) / (xi * xi);
        if (r2 >= 1.0) continue;
        const double w = std::exp(-1.0 / (1.0 - r2));
        num += w * chi_nu(d, t, x - y, nu);
        den += w;
      }
  return num / den;
}

double viscosity_mask(const MovingDomain& d, double t, const Vec3& x, double omega, double mu, double width) {
  return mu * viscosity_fraction(level_set(d, t, x), omega, width);
}

namespace {
Vec3 level_set_gradient(const MovingDomain& d, double t, const Vec3& x, double h, int dim) {
  Vec3 g{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    Vec3 xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    g[a] = (level_set(d, t, xp) - level_set(d, t, xm)) / (2.0 * h);
  }
  return g;
}
}  // namespace

Vec3 boundary_normal(const MovingDomain& d, double t, const Vec3& x, double h, int dim) {
  const Vec3 g = level_set_gradient(d, t, x, h, dim);
  const double l = norm(g);
  if (!(l > 1e-8)) throw Error(ErrorKind::DegenerateGradient, "level-set gradient vanishes");
  return (1.0 / l) * g;
}

double surface_delta(const MovingDomain& d, double t, const Vec3& x, double h, int dim) {
  const double phi = level_set(d, t, x);
  const double k = delta_profile(phi, h);
  if (k == 0.0) return 0.0;
  return k * norm(level_set_gradient(d, t, x, h, dim));
}

bool domain_stays_inside_box(const MovingDomain& d, double T, int dim, int samples, double dt) {
  if (d.shape.kind != Shape::Kind::Disk) return false;
  std::vector<Vec3> pts;
  const double r = d.shape.radius;
  if (dim == 2) {
    for (int i = 0; i < samples; ++i) {
      const double a = 2.0 * std::numbers::pi * i / samples;
      pts.push_back(d.shape.center + Vec3{r * std::cos(a), r * std::sin(a), 0.0});
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < samples; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / samples;
      const double rr = std::sqrt(1.0 - z * z);
      pts.push_back(d.shape.center + r * Vec3{rr * std::cos(golden * i), rr * std::sin(golden * i), z});
    }
  }
  const double hw = d.half_width();
  auto inside = [&](const std::vector<Vec3>& P) {
    for (const auto& p : P)
      for (int a = 0; a < dim; ++a)
        if (!(std::fabs(p[a]) < hw)) return false;
    return true;
  };
  if (!inside(pts)) return false;
  const int steps = std::max(1, static_cast<int>(std::ceil(T / dt)));
  const double h = T / steps;
  for (int s = 0; s < steps; ++s) {
    pts = advance_flow_map(d, pts, s * h, h);
    if (!inside(pts)) return false;
  }
  return true;
}

GeometryTracker::GeometryTracker(const MovingDomain& domain, const Grid& grid, const PenaltyParams& params)
    : domain_(domain), grid_(grid), params_(params) {
  const std::size_t N = grid_.cells();
  foot_.resize(3 * N);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 x = grid_.center(i);
    for (int a = 0; a < 3; ++a) foot_[3 * i + a] = x[a];
  }
  fill_frame(frame_, foot_, 0.0);
}

Vec3 GeometryTracker::interpolate_foot(const std::vector<double>& foot, const Vec3& y) const {
  const double h = grid_.h();
  const int n = grid_.n;
  std::array<int, 3> i0{0, 0, 0};
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int a = 0; a < grid_.dim; ++a) {
    const double f = (y[a] + grid_.half_width) / h - 0.5;
    int i = static_cast<int>(std::floor(f));
    i = std::clamp(i, 0, n - 2);
    i0[a] = i;
    w[a] = f - i;
  }
  Vec3 r{0.0, 0.0, 0.0};
  const int corners = 1 << grid_.dim;
  for (int c = 0; c < corners; ++c) {
    double wt = 1.0;
    std::array<int, 3> id{0, 0, 0};
    for (int a = 0; a < grid_.dim; ++a) {
      const int bit = (c >> a) & 1;
      id[a] = i0[a] + bit;
      wt *= bit ? w[a] : 1.0 - w[a];
    }
    const std::size_t k = grid_.index(id[0], id[1], id[2]);
    for (int a = 0; a < 3; ++a) r[a] += wt * foot[3 * k + a];
  }
  return r;
}

void GeometryTracker::fill_frame(GeometryFrame& f, const std::vector<double>& foot, double t) const {
  const std::size_t N = grid_.cells();
  const int dim = grid_.dim;
  const double h = grid_.h();
  f.t = t;
  f.phi.resize(N);
  f.grad_norm.assign(N, 0.0);
  f.normal.assign(3 * N, 0.0);
  f.sigma.assign(N, 0.0);
  f.chi.resize(N);
  f.mu_frac.resize(N);
  f.V.resize(3 * N);
  f.solid_blend.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    f.phi[i] = domain_.shape.phi0({foot[3 * i], foot[3 * i + 1], foot[3 * i + 2]});
    const Vec3 v = evaluate_V(domain_, t, grid_.center(i));
    for (int a = 0; a < 3; ++a) f.V[3 * i + a] = v[a];
  }
  for (std::size_t i = 0; i < N; ++i) {
    const auto c = grid_.ijk(i);
    Vec3 g{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      const std::size_t s = grid_.stride(a);
      if (c[a] == 0) g[a] = (f.phi[i + s] - f.phi[i]) / h;
      else if (c[a] == grid_.n - 1) g[a] = (f.phi[i] - f.phi[i - s]) / h;
      else g[a] = (f.phi[i + s] - f.phi[i - s]) / (2.0 * h);
    }
    const double l = norm(g);
    f.grad_norm[i] = l;
    if (l > 1e-8)
      for (int a = 0; a < dim; ++a) f.normal[3 * i + a] = g[a] / l;
    const double phi = f.phi[i];
    f.sigma[i] = delta_profile(phi, h) * l;
    f.chi[i] = chi_profile(phi, params_.nu, params_.xi);
    f.mu_frac[i] = viscosity_fraction(phi, params_.omega, 3.0 * h);
    f.solid_blend[i] = smoothstep5((phi - 2.0 * h) / h);
  }
}

const GeometryFrame& GeometryTracker::peek(double dt) {
  if (has_pending_ && pending_dt_ == dt) return pending_;
  const std::size_t N = grid_.cells();
  const double t0 = frame_.t, t1 = frame_.t + dt;
  pending_foot_.resize(3 * N);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 x = grid_.center(i);
    const Vec3 y = advance_point(domain_, x, t1, -dt);
    if (y == x) {
      for (int a = 0; a < 3; ++a) pending_foot_[3 * i + a] = foot_[3 * i + a];
    } else {
      const Vec3 r = interpolate_foot(foot_, y);
      for (int a = 0; a < 3; ++a) pending_foot_[3 * i + a] = r[a];
    }
  }
  (void)t0;
  fill_frame(pending_, pending_foot_, t1);
  has_pending_ = true;
  pending_dt_ = dt;
  return pending_;
}

void GeometryTracker::commit() {
  if (!has_pending_) return;
  foot_.swap(pending_foot_);
  std::swap(frame_, pending_);
  has_pending_ = false;
}

}  // namespace nsf
