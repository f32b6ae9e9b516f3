#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nsf/grid.hpp"

namespace nsf {

// Prescribed velocity of the moving domain. Every built-in field is tapered by a
// C2 ramp between taper_start*R and R, so it vanishes identically for |x| >= R.
class VelocityField {
 public:
  explicit VelocityField(double R, double taper_start) : R_(R), taper_start_(taper_start) {}
  virtual ~VelocityField() = default;
  virtual Vec3 value(double t, const Vec3& x) const = 0;
  virtual std::string name() const = 0;
  double R() const { return R_; }
  double taper_start() const { return taper_start_; }

 protected:
  double taper(const Vec3& x) const;

 private:
  double R_;
  double taper_start_;
};

std::shared_ptr<VelocityField> make_rest_field(double R);
std::shared_ptr<VelocityField> make_translation_field(double R, const Vec3& c, double taper_start = 0.8);
// Rigid rotation about an axis parallel to e_z through `center`.
std::shared_ptr<VelocityField> make_rotation_field(double R, double omega, const Vec3& center, double taper_start = 0.8);
// Radial expansion/contraction about `center`: V = a sin(2 pi f t) (x - center).
std::shared_ptr<VelocityField> make_pulsating_field(double R, double amplitude, double frequency, const Vec3& center,
                                                    double taper_start = 0.8);

// Reference level set phi0 of the initial fluid domain (negative inside).
struct Shape {
  enum class Kind { Disk, HalfSpace, Full };
  Kind kind = Kind::Disk;
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 0.5;
  Vec3 normal{1.0, 0.0, 0.0};
  double offset = 0.0;

  static Shape disk(const Vec3& center, double radius);
  static Shape half_space(const Vec3& normal, double offset);
  static Shape full();
  double phi0(const Vec3& x) const;
};

struct MovingDomain {
  std::shared_ptr<const VelocityField> field;
  Shape shape;
  double R = 1.0;
  // Largest RK4 sub-step used by pointwise backward characteristic tracing.
  double trace_dt = 1e-3;

  double half_width() const { return 2.0 * R; }
};

struct PenaltyParams {
  double eps = 1e-2;
  double omega = 0.1;
  double nu = 0.01;
  double xi = 0.1;
  double delta = 0.1;
  double beta = 5.0;
  // Throws RangeError naming the offending parameter.
  void validate(double gamma) const;
};

Vec3 evaluate_V(const MovingDomain& d, double t, const Vec3& x);
// One classical RK4 step of dX/dt = V(t, X); points outside the support are left alone.
std::vector<Vec3> advance_flow_map(const MovingDomain& d, const std::vector<Vec3>& X, double t, double dt);
Vec3 advance_point(const MovingDomain& d, const Vec3& x, double t, double dt);
double level_set(const MovingDomain& d, double t, const Vec3& x);

// Profiles as functions of the level-set value.
double smoothstep5(double s);
double chi_profile(double phi, double nu, double xi);
double viscosity_fraction(double phi, double omega, double width);
double delta_profile(double phi, double h);

double chi_nu(const MovingDomain& d, double t, const Vec3& x, double nu);
double chi_nu_xi(const MovingDomain& d, double t, const Vec3& x, double nu, double xi);
// Brute-force spatial convolution of chi_nu with a C-infinity bump of radius xi.
double chi_nu_xi_reference(const MovingDomain& d, double t, const Vec3& x, double nu, double xi, int dim,
                           int samples_per_axis = 40);
double viscosity_mask(const MovingDomain& d, double t, const Vec3& x, double omega, double mu, double width);
Vec3 boundary_normal(const MovingDomain& d, double t, const Vec3& x, double h, int dim);
double surface_delta(const MovingDomain& d, double t, const Vec3& x, double h, int dim);

// Samples points on Gamma_0, carries them with the flow map to time T and
// reports whether they stayed strictly inside the box.
bool domain_stays_inside_box(const MovingDomain& d, double T, int dim, int samples = 256, double dt = 1e-2);

// Geometry sampled at cell centres for one time level.
struct GeometryFrame {
  double t = 0.0;
  std::vector<double> phi;       // level set
  std::vector<double> grad_norm; // |grad phi| by central differences
  std::vector<double> normal;    // unit normal, 3 components per cell (zero where degenerate)
  std::vector<double> sigma;     // regularised surface density
  std::vector<double> chi;       // chi_{nu,xi}
  std::vector<double> mu_frac;   // viscosity mask divided by mu, in [omega, 1]
  std::vector<double> V;         // 3 components per cell
  std::vector<double> solid_blend;  // weight pulling deep-solid velocity to V
};

// Tracks the backward characteristic foot points of every cell centre so the
// level set at any time node is phi0 evaluated at the foot point.
class GeometryTracker {
 public:
  GeometryTracker(const MovingDomain& domain, const Grid& grid, const PenaltyParams& params);

  const GeometryFrame& current() const { return frame_; }
  // Frame at current time + dt, kept pending until commit().
  const GeometryFrame& peek(double dt);
  void commit();
  const Grid& grid() const { return grid_; }
  const MovingDomain& domain() const { return domain_; }

 private:
  void fill_frame(GeometryFrame& f, const std::vector<double>& foot, double t) const;
  Vec3 interpolate_foot(const std::vector<double>& foot, const Vec3& y) const;

  MovingDomain domain_;
  Grid grid_;
  PenaltyParams params_;
  std::vector<double> foot_, pending_foot_;
  GeometryFrame frame_, pending_;
  bool has_pending_ = false;
  double pending_dt_ = 0.0;
};

}  // namespace nsf
