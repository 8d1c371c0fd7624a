#pragma once

// Physical parameters, soft-core Coulomb potentials (oscillating and
// averaged), and the gauge maps between the magnetic frame (psi) and the
// moving-nucleus frame (u).

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "beam_path.hpp"
#include "fourier.hpp"
#include "quadrature.hpp"

namespace xfelnls {

struct ModelParams {
  double c = 0.0;   // nucleus repulsion
  double C1 = 0.0;  // Hartree strength
  double a = 0.0;   // focusing power-law strength
  double sigma = 2.0 / 3.0;
  bool global_certified = false;

  void validate() const {
    if (!(c >= 0.0)) throw ConfigError("model.c", "must be nonnegative");
    if (!(C1 >= 0.0)) throw ConfigError("model.C1", "must be nonnegative");
    if (!(a >= 0.0)) throw ConfigError("model.a", "must be nonnegative");
    if (!(sigma > 0.0 && sigma < 4.0)) throw ConfigError("model.sigma", "must lie in (0, 4)");
    if (global_certified && !(sigma < 4.0 / 3.0))
      throw ConfigError("model.sigma",
                        "global-in-time runs require the mass-subcritical range sigma < 4/3");
  }
};

struct SofteningSpec {
  double delta = 0.2;
  std::size_t quad_points = 64;

  void validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("soft.delta", "must be positive");
    if (quad_points < 8 || quad_points % 2 != 0)
      throw ConfigError("soft.quad_points", "must be an even integer >= 8");
  }

  /// Non-fatal advisories for this grid.
  std::vector<std::string> warnings(const GridSpec& grid) const {
    std::vector<std::string> out;
    if (delta < 2.0 * grid.min_spacing())
      out.push_back("soft.delta=" + std::to_string(delta) + " is below twice the grid spacing (" +
                    std::to_string(grid.min_spacing()) + "); the potential core is under-resolved");
    return out;
  }
};

/// out[x] += scale / sqrt(|x - center|^2 + delta^2) over the box-centered grid.
/// Components of `center` beyond the grid dimension are ignored.
inline void add_soft_coulomb(const GridSpec& grid, const Vec3& center, double scale, double delta,
                             std::span<double> out) {
  const double d2 = delta * delta;
  std::array<std::vector<double>, 3> sq;
  for (int i = 0; i < 3; ++i) {
    if (i < grid.dim()) {
      sq[i].resize(grid.points(i));
      for (std::size_t j = 0; j < grid.points(i); ++j) {
        double dx = grid.coordinate(i, j) - center[i];
        dx -= grid.extent(i) * std::round(dx / grid.extent(i));  // minimum image on the torus
        sq[i][j] = dx * dx;
      }
    } else {
      sq[i].assign(1, 0.0);
    }
  }
  std::size_t f = 0;
  for (double s0 : sq[0])
    for (double s1 : sq[1]) {
      const double s01 = s0 + s1 + d2;
      for (double s2 : sq[2]) out[f++] += scale / std::sqrt(s01 + s2);
    }
}

inline Field real_field(const GridSpec& grid, std::span<const double> values) {
  Field f(grid);
  for (std::size_t i = 0; i < values.size(); ++i) f[i] = Complex(values[i], 0.0);
  return f;
}

/// Soft-core potential c / sqrt(|x - b(t)|^2 + delta^2) of the moving nucleus.
inline std::vector<double> oscillating_potential_values(const ModelParams& params,
                                                        const BeamPath& path,
                                                        const SofteningSpec& soft, double t,
                                                        const GridSpec& grid) {
  std::vector<double> v(grid.size(), 0.0);
  if (params.c != 0.0) add_soft_coulomb(grid, beam_displacement(path, t), params.c, soft.delta, v);
  return v;
}

inline Field oscillating_potential(const ModelParams& params, const BeamPath& path,
                                   const SofteningSpec& soft, double t, const GridSpec& grid) {
  return real_field(grid, oscillating_potential_values(params, path, soft, t, grid));
}

/// Fast-phase average (1/2pi) int_0^{2pi} c / sqrt(|x - e(t) f(tau)|^2 + delta^2) dtau by the
/// M-point periodic trapezoid rule. Independent of omega.
inline std::vector<double> averaged_potential_values(const ModelParams& params,
                                                     const BeamPath& path,
                                                     const SofteningSpec& soft, double t,
                                                     const GridSpec& grid) {
  std::vector<double> v(grid.size(), 0.0);
  if (params.c == 0.0) return v;
  const Vec3 e = envelope_value(path.envelope, t);
  const std::size_t m = soft.quad_points;
  if (norm2(e) == 0.0) {
    add_soft_coulomb(grid, {0.0, 0.0, 0.0}, params.c, soft.delta, v);
    return v;
  }
  const double scale = params.c / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double tau = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    add_soft_coulomb(grid, profile_value(path.profile, tau) * e, scale, soft.delta, v);
  }
  return v;
}

inline Field averaged_potential(const ModelParams& params, const BeamPath& path,
                                const SofteningSpec& soft, double t, const GridSpec& grid) {
  return real_field(grid, averaged_potential_values(params, path, soft, t, grid));
}

/// int_{t0}^{t1} |A(s)|^2 ds, composite Gauss-Legendre with panels no wider than
/// min(quad_step, pi / (4 |omega|)).
inline double gauge_phase_between(const BeamPath& path, double t0, double t1, double quad_step) {
  if (t0 == t1) return 0.0;
  if (!(quad_step > 0.0)) throw ContractViolation("gauge_phase: quad_step must be positive");
  static const GaussLegendre rule(6);
  const double width = std::min(quad_step, std::numbers::pi / (4.0 * std::abs(path.omega)));
  const std::size_t panels = panels_for(t0, t1, width);
  return rule.integrate(t0, t1, panels, [&](double s) { return norm2(vector_potential(path, s)); });
}

/// Theta(t) = int_0^t |A(s)|^2 ds
inline double gauge_phase(const BeamPath& path, double t, double quad_step) {
  return gauge_phase_between(path, 0.0, t, quad_step);
}

namespace detail {

inline Field translate_and_phase(const Field& f, const Vec3& shift, double phase) {
  f.require_space(Space::Physical, "gauge map");
  const int dim = f.grid().dim();
  Field out = f;
  bool zero_shift = true;
  for (int i = 0; i < dim; ++i) zero_shift = zero_shift && shift[i] == 0.0;
  if (!zero_shift) {
    fft_forward(out.grid(), out.values());
    const WaveTable table(out.grid());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto k = table.wavevector(i);
      double kb = 0.0;
      for (int a = 0; a < dim; ++a) kb += k[a] * shift[a];
      out[i] *= std::polar(1.0, kb);
    }
    fft_inverse(out.grid(), out.values());
  }
  if (phase != 0.0) out *= std::polar(1.0, phase);
  return out;
}

}  // namespace detail

/// u(t, x) = psi(t, x + b(t)) exp(i Theta), translation done exactly by the shift theorem.
inline Field gauge_u_from_psi(const Field& psi, const BeamPath& path, double t, double theta) {
  return detail::translate_and_phase(psi, beam_displacement(path, t), theta);
}

/// psi(t, x) = u(t, x - b(t)) exp(-i Theta)
inline Field gauge_psi_from_u(const Field& u, const BeamPath& path, double t, double theta) {
  return detail::translate_and_phase(u, -1.0 * beam_displacement(path, t), -theta);
}

}  // namespace xfelnls
