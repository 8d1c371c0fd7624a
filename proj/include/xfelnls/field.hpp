#pragma once

#include <complex>
#include <span>
#include <vector>

#include "grid.hpp"

namespace xfelnls {

using Complex = std::complex<double>;

enum class Space : unsigned char { Physical = 0, Fourier = 1 };

/// Complex samples on a grid, either in physical space or as DFT coefficients.
class Field {
 public:
  Field() = default;

  explicit Field(const GridSpec& grid, Space space = Space::Physical)
      : grid_(grid), values_(grid.size(), Complex{0.0, 0.0}), space_(space) {}

  Field(const GridSpec& grid, std::vector<Complex> values, Space space = Space::Physical)
      : grid_(grid), values_(std::move(values)), space_(space) {
    if (values_.size() != grid_.size())
      throw ContractViolation("Field: value count does not match grid size");
  }

  /// Samples `fn(x)` at every box-centered grid position.
  template <class Fn>
  static Field sample(const GridSpec& grid, Fn&& fn) {
    Field f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) f.values_[i] = Complex(fn(grid.position(i)));
    return f;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  Space space() const noexcept { return space_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<Complex> values() noexcept { return values_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::vector<Complex>& storage() noexcept { return values_; }
  const std::vector<Complex>& storage() const noexcept { return values_; }

  Complex& operator[](std::size_t i) noexcept { return values_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }

  void set_space(Space s) noexcept { space_ = s; }

  void require_space(Space s, const char* op) const {
    if (space_ != s)
      throw ContractViolation(std::string(op) + ": field is in the wrong space");
  }

  Field& operator*=(Complex s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

  Field& operator-=(const Field& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
  }

  Field& operator+=(const Field& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
  }

  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator*(Complex s, Field a) { return a *= s; }

  bool all_finite() const noexcept {
    for (const auto& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

 private:
  void check_compatible(const Field& other) const {
    if (!(grid_ == other.grid_) || space_ != other.space_)
      throw ContractViolation("Field: grid or space mismatch");
  }

  GridSpec grid_;
  std::vector<Complex> values_;
  Space space_ = Space::Physical;
};

}  // namespace xfelnls
