#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nsf/grid.hpp"

namespace nsf {

// A scalar material law of one non-negative variable: either a sum of power
// terms c*x^e or a table with monotone cubic interpolation.
class Law {
 public:
  struct Term {
    double coef = 0.0;
    double exponent = 0.0;
  };

  Law() = default;
  static Law zero();
  static Law power(double coef, double exponent);
  static Law power_sum(std::vector<Term> terms);
  static Law table(std::vector<double> xs, std::vector<double> ys);

  double value(double x) const;
  double derivative(double x) const;

  bool is_power_sum() const { return kind_ == Kind::PowerSum; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<double>& table_x() const { return xs_; }
  const std::vector<double>& table_y() const { return ys_; }

  // Canonical textual form understood by the config parser.
  std::string describe() const;
  bool operator==(const Law& other) const;

 private:
  enum class Kind { PowerSum, Table };
  Kind kind_ = Kind::PowerSum;
  std::vector<Term> terms_;
  std::vector<double> xs_, ys_, slopes_;
};

struct ConstitutiveSet {
  double gamma = 2.0;
  double alpha = 6.0;
  double mu = 1.0;
  double eta = 0.0;
  double zeta = 0.0;
  Law p_e = Law::power(1.0, 2.0);
  Law p_theta = Law::power(1.0, 2.0 / 3.0);
  Law c_v = Law::power_sum({{1.0, 0.0}, {1.0, 2.0}});
  Law kappa = Law::power_sum({{1.0, 0.0}, {1.0, 6.0}});

  // Constants of the structural bounds checked by validate_hypotheses.
  double a1 = 1.0, a2 = 1.0, b = 1.0;
  double k1 = 0.5, k2 = 2.0;
  double c_lower = 0.5, c_upper = 2.0;
  double c_ptheta = 1.0;

  static ConstitutiveSet defaults() { return {}; }
};

double pressure(const ConstitutiveSet& set, double rho, double theta);
double artificial_pressure(const ConstitutiveSet& set, double rho, double theta, double delta, double beta);
double elastic_potential(const ConstitutiveSet& set, double rho);
double thermal_Q(const ConstitutiveSet& set, double theta);
// seed < 0 selects the default starting point q / c_v(0).
double invert_Q(const ConstitutiveSet& set, double q, double seed = -1.0);
double conductivity_primitive(const ConstitutiveSet& set, double theta);

struct RenormValues {
  double Q_h = 0.0;
  double K_h = 0.0;
  double h = 1.0;
};
RenormValues renorm_pair(const ConstitutiveSet& set, double theta, double z);

Mat3 stress(const Mat3& grad_u, double mu_eff, double eta, int dim);

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  double tightest_c_ptheta = 0.0;
  bool all_passed() const;
  const HypothesisCheck* find(const std::string& name) const;
  std::string to_text() const;
};

HypothesisReport validate_hypotheses(const ConstitutiveSet& set);

// Unchecked helpers used on hot paths of the solver.
namespace fast {
// d/drho of (rho * P_e(rho)) = P_e + p_e / rho
double elastic_enthalpy(const ConstitutiveSet& set, double rho);
}  // namespace fast

}  // namespace nsf
