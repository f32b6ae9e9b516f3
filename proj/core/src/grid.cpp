#include "nsf/grid.hpp"

#include "nsf/error.hpp"

namespace nsf {

Grid::Grid(int dim_, int n_, double half_width_) : dim(dim_), n(n_), half_width(half_width_) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::BadConfig, "grid dimension must be 2 or 3");
  if (n < 16) throw Error(ErrorKind::BadConfig, "grid needs at least 16 cells per axis");
  if (!(half_width > 0.0)) throw Error(ErrorKind::BadConfig, "grid half width must be positive");
}

std::size_t Grid::cells() const {
  std::size_t c = 1;
  for (int a = 0; a < dim; ++a) c *= static_cast<std::size_t>(n);
  return c;
}

std::size_t Grid::stride(int axis) const {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

std::array<int, 3> Grid::ijk(std::size_t idx) const {
  std::array<int, 3> r{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    r[a] = static_cast<int>(idx % static_cast<std::size_t>(n));
    idx /= static_cast<std::size_t>(n);
  }
  return r;
}

std::size_t Grid::index(int i, int j, int k) const {
  const auto nn = static_cast<std::size_t>(n);
  return static_cast<std::size_t>(i) + nn * (static_cast<std::size_t>(j) + (dim == 3 ? nn * static_cast<std::size_t>(k) : 0));
}

Vec3 Grid::center(std::size_t idx) const {
  const auto c = ijk(idx);
  const double hh = h();
  Vec3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = -half_width + (c[a] + 0.5) * hh;
  return x;
}

}  // namespace nsf
