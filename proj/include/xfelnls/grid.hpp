#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace xfelnls {

using Vec3 = std::array<double, 3>;

/// Uniform periodic grid on the box [-L_i/2, L_i/2) along each active axis.
///
/// Axes beyond `dim()` are inactive and report one point. Samples are stored
/// row-major with the last active axis fastest. The stored extent is always
/// `spacing * points`, so the two agree bit-for-bit.
class GridSpec {
 public:
  GridSpec() = default;

  GridSpec(int dim, const Vec3& extent, const std::array<std::size_t, 3>& points) : dim_(dim) {
    if (dim < 1 || dim > 3) throw ContractViolation("GridSpec: dim must be 1, 2 or 3");
    std::size_t total = 1;
    for (int i = 0; i < 3; ++i) {
      if (i >= dim) {
        points_[i] = 1;
        spacing_[i] = 1.0;
        extent_[i] = 1.0;
        continue;
      }
      if (!(extent[i] > 0.0) || !std::isfinite(extent[i]))
        throw ContractViolation("GridSpec: extent must be positive and finite");
      if (points[i] < 8 || points[i] % 2 != 0)
        throw ContractViolation("GridSpec: points must be an even integer >= 8");
      if (total > std::numeric_limits<std::size_t>::max() / points[i])
        throw ContractViolation("GridSpec: total point count overflows");
      total *= points[i];
      points_[i] = points[i];
      spacing_[i] = extent[i] / static_cast<double>(points[i]);
      extent_[i] = spacing_[i] * static_cast<double>(points[i]);
    }
    size_ = total;
  }

  /// Cube with the same extent and point count on every active axis.
  static GridSpec cube(int dim, double extent, std::size_t points) {
    return GridSpec(dim, {extent, extent, extent}, {points, points, points});
  }

  int dim() const noexcept { return dim_; }
  double extent(int axis) const { return extent_.at(axis); }
  std::size_t points(int axis) const { return points_.at(axis); }
  double spacing(int axis) const { return spacing_.at(axis); }
  std::size_t size() const noexcept { return size_; }

  double cell_volume() const noexcept {
    double v = 1.0;
    for (int i = 0; i < dim_; ++i) v *= spacing_[i];
    return v;
  }

  double box_volume() const noexcept {
    double v = 1.0;
    for (int i = 0; i < dim_; ++i) v *= extent_[i];
    return v;
  }

  double min_spacing() const noexcept {
    double h = spacing_[0];
    for (int i = 1; i < dim_; ++i) h = std::min(h, spacing_[i]);
    return h;
  }

  /// Box-centered coordinate of index j along an axis.
  double coordinate(int axis, std::size_t j) const {
    return -0.5 * extent_[axis] + static_cast<double>(j) * spacing_[axis];
  }

  /// Multi-index of a flat row-major index. Inactive axes are zero.
  std::array<std::size_t, 3> unflatten(std::size_t flat) const noexcept {
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (int i = dim_ - 1; i >= 0; --i) {
      idx[i] = flat % points_[i];
      flat /= points_[i];
    }
    return idx;
  }

  std::size_t flatten(const std::array<std::size_t, 3>& idx) const noexcept {
    std::size_t flat = 0;
    for (int i = 0; i < dim_; ++i) flat = flat * points_[i] + idx[i];
    return flat;
  }

  /// Box-centered position of a flat index; inactive components are zero.
  Vec3 position(std::size_t flat) const noexcept {
    const auto idx = unflatten(flat);
    Vec3 x{0.0, 0.0, 0.0};
    for (int i = 0; i < dim_; ++i) x[i] = coordinate(i, idx[i]);
    return x;
  }

  /// Per-axis coordinate tables.
  std::array<std::vector<double>, 3> axes() const {
    std::array<std::vector<double>, 3> out;
    for (int i = 0; i < dim_; ++i) {
      out[i].resize(points_[i]);
      for (std::size_t j = 0; j < points_[i]; ++j) out[i][j] = coordinate(i, j);
    }
    return out;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.dim_ == b.dim_ && a.points_ == b.points_ && a.extent_ == b.extent_;
  }

 private:
  int dim_ = 1;
  Vec3 extent_{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> points_{1, 1, 1};
  Vec3 spacing_{1.0, 1.0, 1.0};
  std::size_t size_ = 1;
};

/// Wavenumbers per axis in transform-natural order:
/// (2 pi / L) * {0, 1, ..., N/2 - 1, -N/2, ..., -1}.
class WaveTable {
 public:
  explicit WaveTable(const GridSpec& grid) : grid_(grid) {
    for (int i = 0; i < grid.dim(); ++i) {
      const std::size_t n = grid.points(i);
      const double dk = 2.0 * std::numbers::pi / grid.extent(i);
      k_[i].resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        const auto signed_j = j < n / 2 ? static_cast<double>(j)
                                        : static_cast<double>(j) - static_cast<double>(n);
        k_[i][j] = dk * signed_j;
      }
    }
  }

  const std::vector<double>& axis(int i) const { return k_.at(i); }

  Vec3 wavevector(std::size_t flat) const noexcept {
    const auto idx = grid_.unflatten(flat);
    Vec3 k{0.0, 0.0, 0.0};
    for (int i = 0; i < grid_.dim(); ++i) k[i] = k_[i][idx[i]];
    return k;
  }

  /// |k|^2 for every flat index.
  std::vector<double> squared_magnitudes() const {
    std::vector<double> out(grid_.size());
    for (std::size_t f = 0; f < out.size(); ++f) {
      const auto k = wavevector(f);
      out[f] = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    }
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }

 private:
  GridSpec grid_;
  std::array<std::vector<double>, 3> k_;
};

}  // namespace xfelnls
