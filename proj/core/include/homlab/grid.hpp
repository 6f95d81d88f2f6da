#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace homlab {

/// Uniform periodic (t, x_1, ..., x_d) grid. Node (it, i_1, ..., i_d) sits at
/// (it h_t, i_1 h_1, ...); flat indices run x_1 fastest and t slowest.
struct GridShape {
  std::vector<int> n;           // N_t, N_1, ..., N_d
  std::vector<double> periods;  // same layout

  int dim() const noexcept { return static_cast<int>(n.size()) - 1; }
  std::size_t size() const noexcept;
  std::size_t spatial_size() const noexcept;
  double spacing(int axis) const { return periods.at(axis) / n.at(axis); }
  std::size_t stride(int axis) const noexcept;

  /// Flat index with periodic wrap of every component.
  std::size_t index(const std::vector<int>& multi) const noexcept;
  std::vector<int> multi_index(std::size_t flat) const;

  /// Throws ConfigError unless every N >= 1 (N_i >= 3 in space) and every period > 0.
  void validate() const;

  bool operator==(const GridShape&) const = default;
};

struct GridFunction {
  GridShape shape;
  Eigen::VectorXd values;

  GridFunction() = default;
  explicit GridFunction(GridShape s) : shape(std::move(s)), values(Eigen::VectorXd::Zero(shape.size())) {}

  /// Largest change along the t axis at fixed x.
  double max_time_variation() const;
};

}  // namespace homlab
