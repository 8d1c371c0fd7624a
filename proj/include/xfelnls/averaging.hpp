#pragma once

// Numerical checks of high-frequency averaging for a smooth bounded test
// function zeta translated along the fast path e(t) sin(omega t):
//   * cube averages of zeta(x - b(t)) against those of the tau-average, and
//   * sup_{t,x} | int_0^t zeta(x - e(t') sin(omega t')) - <zeta>(t', x) dt' |,
//     which decays like 1/omega.
// The fast profile is always sin here, whatever BeamPath::profile says.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "beam_path.hpp"
#include "quadrature.hpp"

namespace xfelnls {

struct GaussianZeta {
  double width = 1.0;  // exp(-|x|^2 / (2 width^2))
};
struct SoftCoulombZeta {
  double c = 1.0;
  double delta = 0.5;  // c / sqrt(|x|^2 + delta^2)
};
struct ConstantZeta {
  double value = 1.0;
};

struct TestFunctionSpec {
  std::variant<GaussianZeta, SoftCoulombZeta, ConstantZeta> kind = GaussianZeta{};
  double offset = 0.0;           // added to zeta everywhere
  std::size_t tau_points = 64;   // periodic trapezoid points for <zeta>

  bool is_constant() const noexcept { return std::holds_alternative<ConstantZeta>(kind); }

  double operator()(const Vec3& x) const {
    const double r2 = norm2(x);
    return offset + std::visit(
                        [r2](const auto& z) -> double {
                          using Z = std::decay_t<decltype(z)>;
                          if constexpr (std::is_same_v<Z, GaussianZeta>)
                            return std::exp(-r2 / (2.0 * z.width * z.width));
                          else if constexpr (std::is_same_v<Z, SoftCoulombZeta>)
                            return z.c / std::sqrt(r2 + z.delta * z.delta);
                          else
                            return z.value;
                        },
                        kind);
  }

  double sup_abs() const {
    return std::abs(offset) +
           std::visit(
               [](const auto& z) -> double {
                 using Z = std::decay_t<decltype(z)>;
                 if constexpr (std::is_same_v<Z, GaussianZeta>)
                   return 1.0;
                 else if constexpr (std::is_same_v<Z, SoftCoulombZeta>)
                   return std::abs(z.c) / z.delta;
                 else
                   return std::abs(z.value);
               },
               kind);
  }

  /// (1/2pi) int_0^{2pi} zeta(x - e sin tau) dtau
  double tau_average(const Vec3& x, const Vec3& e) const {
    double s = 0.0;
    for (std::size_t m = 0; m < tau_points; ++m) {
      const double tau = 2.0 * std::numbers::pi * static_cast<double>(m) /
                         static_cast<double>(tau_points);
      s += (*this)(x - std::sin(tau) * e);
    }
    return s / static_cast<double>(tau_points);
  }
};

namespace detail {

/// zeta(x - e(t) sin(omega t)) - <zeta>(t, x); `cached_avg` is used when the envelope is constant.
inline double averaging_integrand(const TestFunctionSpec& zeta, const Envelope& env, double omega,
                                  const Vec3& x, double t, std::optional<double> cached_avg) {
  if (zeta.is_constant()) return 0.0;
  const Vec3 e = envelope_value(env, t);
  const double avg = cached_avg ? *cached_avg : zeta.tau_average(x, e);
  return zeta(x - std::sin(omega * t) * e) - avg;
}

}  // namespace detail

struct SpaceTimeCube {
  double t0 = 0.0;
  double t1 = 1.0;
  Vec3 lo{-1.0, -1.0, -1.0};
  Vec3 hi{1.0, 1.0, 1.0};

  double volume() const {
    return (t1 - t0) * (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  }
};

/// |avg_E zeta(x - b(t)) - avg_E <zeta>(t, x)| by tensor Gauss-Legendre. Time panels are
/// pi / (4 omega) wide; each spatial axis uses `space_panels` panels of 4 nodes.
inline double cube_average_residual(const BeamPath& path, const TestFunctionSpec& zeta,
                                    double omega, const SpaceTimeCube& cube,
                                    std::size_t space_panels = 2) {
  if (!(cube.volume() > 0.0)) throw ContractViolation("cube_average_residual: empty cube");
  if (omega == 0.0) throw ContractViolation("cube_average_residual: omega must be nonzero");
  if (zeta.is_constant()) return 0.0;
  const GaussLegendre rule(4);

  std::vector<std::pair<double, double>> tn;  // (node, weight)
  const std::size_t tp = panels_for(cube.t0, cube.t1, std::numbers::pi / (4.0 * std::abs(omega)));
  const double th = (cube.t1 - cube.t0) / static_cast<double>(tp);
  for (std::size_t p = 0; p < tp; ++p) {
    const double a = cube.t0 + static_cast<double>(p) * th;
    for (std::size_t i = 0; i < rule.size(); ++i)
      tn.emplace_back(rule.node(a, a + th, i), rule.weight(a, a + th, i));
  }
  std::array<std::vector<std::pair<double, double>>, 3> xn;
  for (int d = 0; d < 3; ++d) {
    const double h = (cube.hi[d] - cube.lo[d]) / static_cast<double>(space_panels);
    for (std::size_t p = 0; p < space_panels; ++p) {
      const double a = cube.lo[d] + static_cast<double>(p) * h;
      for (std::size_t i = 0; i < rule.size(); ++i)
        xn[d].emplace_back(rule.node(a, a + h, i), rule.weight(a, a + h, i));
    }
  }

  const bool frozen = is_constant(path.envelope);
  const Vec3 e0 = envelope_value(path.envelope, cube.t0);
  double total = 0.0;
  for (const auto& [x0, w0] : xn[0])
    for (const auto& [x1, w1] : xn[1])
      for (const auto& [x2, w2] : xn[2]) {
        const Vec3 x{x0, x1, x2};
        std::optional<double> avg;
        if (frozen) avg = zeta.tau_average(x, e0);
        double inner = 0.0;
        for (const auto& [t, wt] : tn)
          inner += wt * detail::averaging_integrand(zeta, path.envelope, omega, x, t, avg);
        total += w0 * w1 * w2 * inner;
      }
  return std::abs(total) / cube.volume();
}

/// Evaluation lattice for the uniform residual: spatial points from a box-centered grid, and
/// `time_intervals` uniform intervals of [0, T] (0 means the lattice is {t = 0} only). When
/// unset, 32 intervals per fast period are used (at least 64).
struct ResidualLattice {
  GridSpec space = GridSpec::cube(3, 8.0, 8);
  std::optional<std::size_t> time_intervals;
};

/// max over the lattice of |int_0^t zeta(x - e(t') sin(omega t')) - <zeta>(t', x) dt'|.
inline double uniform_sup_residual(const BeamPath& path, const TestFunctionSpec& zeta, double omega,
                                 double horizon, const ResidualLattice& lattice = {}) {
  if (omega == 0.0) throw ContractViolation("uniform_sup_residual: omega must be nonzero");
  if (!(horizon > 0.0)) throw ContractViolation("uniform_sup_residual: T must be positive");
  if (zeta.is_constant()) return 0.0;
  const double period = 2.0 * std::numbers::pi / std::abs(omega);
  const std::size_t intervals =
      lattice.time_intervals.value_or(std::max<std::size_t>(
          64, static_cast<std::size_t>(std::ceil(32.0 * horizon / period))));
  if (intervals == 0) return 0.0;
  const double h = horizon / static_cast<double>(intervals);
  // at least 8 nodes per fast period inside each interval
  const std::size_t nodes =
      std::max<std::size_t>(6, static_cast<std::size_t>(std::ceil(8.0 * h / period)));
  const GaussLegendre rule(nodes);
  const bool frozen = is_constant(path.envelope);
  const Vec3 e0 = envelope_value(path.envelope, 0.0);
  const auto& grid = lattice.space;

  double sup = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const Vec3 x = grid.position(f);
    std::optional<double> avg;
    if (frozen) avg = zeta.tau_average(x, e0);
    double acc = 0.0;
    for (std::size_t k = 0; k < intervals; ++k) {
      const double a = static_cast<double>(k) * h;
      const double b = static_cast<double>(k + 1) * h;
      acc += rule.integrate(a, b, [&](double t) {
        return detail::averaging_integrand(zeta, path.envelope, omega, x, t, avg);
      });
      sup = std::max(sup, std::abs(acc));
    }
  }
  return sup;
}

struct RateFitResult {
  std::vector<double> omegas;
  std::vector<double> residuals;
  double slope = 0.0;
  double intercept = 0.0;
  /// max_j residual_j * omega_j / bound_constant
  double max_ratio = 0.0;
};

/// Least-squares line through (log omega, log residual).
inline RateFitResult fit_rate(std::vector<std::pair<double, double>> samples,
                              double bound_constant = 1.0) {
  if (samples.size() < 3) throw ContractViolation("fit_rate: need at least 3 samples");
  std::sort(samples.begin(), samples.end());
  RateFitResult out;
  double mx = 0.0, my = 0.0;
  for (const auto& [w, r] : samples) {
    if (!(w > 0.0)) throw ContractViolation("fit_rate: omega must be positive");
    if (!(r > 0.0)) throw ContractViolation("fit_rate: residual must be positive");
    out.omegas.push_back(w);
    out.residuals.push_back(r);
    mx += std::log(w);
    my += std::log(r);
    out.max_ratio = std::max(out.max_ratio, r * w / bound_constant);
  }
  const double n = static_cast<double>(samples.size());
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [w, r] : samples) {
    const double dx = std::log(w) - mx;
    sxy += dx * (std::log(r) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ContractViolation("fit_rate: omegas must not all coincide");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  return out;
}

}  // namespace xfelnls
