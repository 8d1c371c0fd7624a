#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fourier.hpp"

namespace xfelnls {

enum class HartreeMode {
  FourierMultiplier3D,  // 4 pi / |k|^2, zero mode dropped; 3D only
  SampledSoftKernel     // circular convolution with 1 / sqrt(|x|^2 + delta_h^2)
};

struct HartreeKernelSpec {
  HartreeMode mode = HartreeMode::FourierMultiplier3D;
  double delta_h = 0.5;
};

/// FourierMultiplier3D in 3D, SampledSoftKernel otherwise.
inline HartreeKernelSpec default_hartree_spec(int dim, double delta_h = 0.5) {
  return {dim == 3 ? HartreeMode::FourierMultiplier3D : HartreeMode::SampledSoftKernel, delta_h};
}

/// Evaluates Phi = |.|^{-1} * |u|^2 on a fixed grid. The kernel multiplier is built once.
/// Not shareable across threads mid-call (owns a scratch buffer).
class HartreeSolver {
 public:
  HartreeSolver(const GridSpec& grid, const HartreeKernelSpec& spec)
      : grid_(grid), kernel_(grid.size()), scratch_(grid.size()) {
    if (spec.mode == HartreeMode::FourierMultiplier3D) {
      if (grid.dim() != 3)
        throw UnsupportedConfiguration("hartree: FourierMultiplier3D requires a 3D grid");
      const WaveTable table(grid);
      const auto k2 = table.squared_magnitudes();
      for (std::size_t i = 0; i < k2.size(); ++i)
        kernel_[i] = k2[i] > 0.0 ? 4.0 * std::numbers::pi / k2[i] : 0.0;
    } else {
      if (!(spec.delta_h > 0.0))
        throw ContractViolation("hartree: delta_h must be positive");
      // Kernel sampled at minimum-image offsets from index 0, then transformed.
      std::vector<Complex> k(grid.size());
      const double d2 = spec.delta_h * spec.delta_h;
      for (std::size_t f = 0; f < k.size(); ++f) {
        const auto idx = grid.unflatten(f);
        double r2 = d2;
        for (int a = 0; a < grid.dim(); ++a) {
          const auto n = grid.points(a);
          const double j = idx[a] < n / 2 ? static_cast<double>(idx[a])
                                          : static_cast<double>(idx[a]) - static_cast<double>(n);
          const double x = j * grid.spacing(a);
          r2 += x * x;
        }
        k[f] = Complex(1.0 / std::sqrt(r2), 0.0);
      }
      fft_forward(grid, k);
      const double vol = grid.cell_volume();
      for (std::size_t f = 0; f < k.size(); ++f) kernel_[f] = vol * k[f].real();
    }
  }

  /// phi_out[x] = (|.|^{-1} * |u|^2)(x), real part of the transform pipeline.
  void potential(std::span<const Complex> u, std::span<double> phi_out) {
    for (std::size_t i = 0; i < u.size(); ++i) scratch_[i] = Complex(std::norm(u[i]), 0.0);
    fft_forward(grid_, scratch_);
    for (std::size_t i = 0; i < scratch_.size(); ++i) scratch_[i] *= kernel_[i];
    fft_inverse(grid_, scratch_);
    for (std::size_t i = 0; i < scratch_.size(); ++i) phi_out[i] = scratch_[i].real();
  }

  /// Largest imaginary residue seen in the last call.
  double last_imaginary_residue() const noexcept {
    double m = 0.0;
    for (const auto& v : scratch_) m = std::max(m, std::abs(v.imag()));
    return m;
  }

  const GridSpec& grid() const noexcept { return grid_; }

 private:
  GridSpec grid_;
  std::vector<double> kernel_;
  std::vector<Complex> scratch_;
};

inline Field hartree_potential(const Field& u, const HartreeKernelSpec& spec) {
  u.require_space(Space::Physical, "hartree_potential");
  HartreeSolver solver(u.grid(), spec);
  std::vector<double> phi(u.size());
  solver.potential(u.values(), phi);
  Field out(u.grid());
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = Complex(phi[i], 0.0);
  return out;
}

/// |u|^sigma with 0 where u == 0.
inline double abs_pow(Complex z, double sigma) {
  const double m = std::abs(z);
  return m == 0.0 ? 0.0 : std::pow(m, sigma);
}

/// -a |u|^sigma u, pointwise.
inline Field power_term(const Field& u, double sigma, double a) {
  u.require_space(Space::Physical, "power_term");
  if (!(sigma > 0.0)) throw ContractViolation("power_term: sigma must be positive");
  Field out(u.grid());
  if (a == 0.0) return out;
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = (-a * abs_pow(u[i], sigma)) * u[i];
  return out;
}

}  // namespace xfelnls
