#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace nsf {

// Points and vectors always carry three components; the third is zero in 2D.
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// Uniform cell-centred grid on the box [-half_width, half_width]^dim.
struct Grid {
  int dim = 2;
  int n = 64;
  double half_width = 2.0;

  Grid() = default;
  Grid(int dim_, int n_, double half_width_);

  double h() const { return 2.0 * half_width / n; }
  double cell_volume() const { return std::pow(h(), dim); }
  std::size_t cells() const;
  // Linear index stride along an axis.
  std::size_t stride(int axis) const;
  std::array<int, 3> ijk(std::size_t idx) const;
  std::size_t index(int i, int j, int k = 0) const;
  Vec3 center(std::size_t idx) const;
};

}  // namespace nsf
