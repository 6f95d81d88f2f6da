#include "homlab/grid.hpp"

#include "homlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace homlab {

std::size_t GridShape::size() const noexcept {
  std::size_t s = 1;
  for (int k : n) s *= static_cast<std::size_t>(k);
  return s;
}

std::size_t GridShape::spatial_size() const noexcept { return n.empty() ? 0 : size() / static_cast<std::size_t>(n[0]); }

std::size_t GridShape::stride(int axis) const noexcept {
  // x_1 is fastest, then x_2, ..., then t.
  if (axis == 0) return spatial_size();
  std::size_t s = 1;
  for (int k = 1; k < axis; ++k) s *= static_cast<std::size_t>(n[k]);
  return s;
}

std::size_t GridShape::index(const std::vector<int>& multi) const noexcept {
  std::size_t flat = 0;
  for (int axis = 0; axis <= dim(); ++axis) {
    int m = multi[axis] % n[axis];
    if (m < 0) m += n[axis];
    flat += static_cast<std::size_t>(m) * stride(axis);
  }
  return flat;
}

std::vector<int> GridShape::multi_index(std::size_t flat) const {
  std::vector<int> m(n.size());
  m[0] = static_cast<int>(flat / spatial_size());
  flat %= spatial_size();
  for (int axis = 1; axis <= dim(); ++axis) {
    m[axis] = static_cast<int>(flat % static_cast<std::size_t>(n[axis]));
    flat /= static_cast<std::size_t>(n[axis]);
  }
  return m;
}

void GridShape::validate() const {
  if (n.size() < 2 || n.size() > 4) throw ConfigError("grid needs one time axis and 1 to 3 space axes");
  if (periods.size() != n.size()) throw ConfigError("grid periods must match the grid shape");
  if (n[0] < 1) throw ConfigError("grid needs N_t >= 1");
  for (std::size_t k = 1; k < n.size(); ++k)
    if (n[k] < 3) throw ConfigError("grid needs at least 3 nodes per space axis");
  for (double p : periods)
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("grid periods must be positive");
}

double GridFunction::max_time_variation() const {
  const std::size_t S = shape.spatial_size();
  double worst = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    double lo = values[s], hi = values[s];
    for (int it = 1; it < shape.n[0]; ++it) {
      const double v = values[it * S + s];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

}  // namespace homlab
