#pragma once

// Closed-form reference solutions used by the unit and acceptance tests.

#include <cmath>
#include <complex>
#include <numbers>

#include <xfelnls/xfelnls.hpp>

namespace oracles {

using xfelnls::Complex;
using xfelnls::Vec3;

/// Free evolution of the unit-mass Gaussian of width s under i u_t = -Lap u in d dimensions:
/// the variance parameter s^2 becomes s^2 + 2 i t.
inline xfelnls::Field free_gaussian(const xfelnls::GridSpec& grid, double s, double t) {
  const Complex s2t(s * s, 2.0 * t);
  const double d = grid.dim();
  const Complex pref =
      std::pow(std::numbers::pi * s * s, -0.25 * d) * std::pow(Complex(s * s, 0.0) / s2t, 0.5 * d);
  return xfelnls::Field::sample(grid, [&](const Vec3& x) {
    return pref * std::exp(-xfelnls::norm2(x) / (2.0 * s2t));
  });
}

/// Smooth part R = G - 1/|x| of the mean-zero periodic Coulomb Green's function of a cubic
/// box of side L (solving -Lap G = 4 pi (delta - 1/L^3)), by Ewald summation.
class EwaldRemainder {
 public:
  explicit EwaldRemainder(double box, double alpha = 0.3, int real_images = 1, int modes = 10)
      : L_(box), alpha_(alpha), images_(real_images) {
    const double volume = L_ * L_ * L_;
    const double dk = 2.0 * std::numbers::pi / L_;
    for (int a = -modes; a <= modes; ++a)
      for (int b = -modes; b <= modes; ++b)
        for (int c = 0; c <= modes; ++c) {
          // half space: c > 0, or c == 0 with (b, a) lexicographically positive
          if (c == 0 && (b < 0 || (b == 0 && a <= 0))) continue;
          const Vec3 k{a * dk, b * dk, c * dk};
          const double k2 = xfelnls::norm2(k);
          const double w = 2.0 * 4.0 * std::numbers::pi / (volume * k2) * std::exp(-k2 / (4.0 * alpha_ * alpha_));
          if (w > 1e-18) modes_.push_back({k, w});
        }
    constant_ = -std::numbers::pi / (alpha_ * alpha_ * volume);
  }

  double operator()(const Vec3& x) const {
    double real = 0.0;
    for (int i = -images_; i <= images_; ++i)
      for (int j = -images_; j <= images_; ++j)
        for (int l = -images_; l <= images_; ++l) {
          const Vec3 y{x[0] + i * L_, x[1] + j * L_, x[2] + l * L_};
          const double r = std::sqrt(xfelnls::norm2(y));
          if (i == 0 && j == 0 && l == 0) {
            // (erfc(a r) - 1) / r, with its r -> 0 limit
            real += r < 1e-8 ? -2.0 * alpha_ / std::sqrt(std::numbers::pi) : -std::erf(alpha_ * r) / r;
          } else {
            real += std::erfc(alpha_ * r) / r;
          }
        }
    double recip = 0.0;
    for (const auto& m : modes_) recip += m.weight * std::cos(xfelnls::dot(m.k, x));
    return real + recip + constant_;
  }

 private:
  struct Mode {
    Vec3 k;
    double weight;
  };
  double L_;
  double alpha_;
  int images_;
  std::vector<Mode> modes_;
  double constant_ = 0.0;
};

/// Mean-zero periodic potential of the density exp(-|x|^2) in a cube of side L:
///   pi^{3/2} erf(r) / r + Q R(x) + pi Q / L^3,   Q = pi^{3/2}.
/// Exact (up to exponentially small tails) because R has constant Laplacian 4 pi / L^3,
/// so its average against a radial density is R(x) plus the second-moment term.
inline double periodic_gaussian_hartree(const EwaldRemainder& R, double box, const Vec3& x) {
  const double q = std::pow(std::numbers::pi, 1.5);
  const double r = std::sqrt(xfelnls::norm2(x));
  const double free = r < 1e-8 ? 2.0 * std::numbers::pi : q * std::erf(r) / r;
  return free + q * R(x) + std::numbers::pi * q / (box * box * box);
}

}  // namespace oracles
