#pragma once

// Strang split-step integration of
//   i du/dt = -Lap u + V u + C1 (|.|^{-1} * |u|^2) u - a |u|^sigma u
// with V the oscillating potential, its fast-phase average, or (magnetic
// form) the static nucleus together with the kinetic symbol |k + A(t)|^2.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "nonlinearity.hpp"

namespace xfelnls {

enum class EquationForm { Oscillating, Averaged, Magnetic };

inline std::string to_string(EquationForm f) {
  switch (f) {
    case EquationForm::Oscillating: return "oscillating";
    case EquationForm::Averaged: return "averaged";
    case EquationForm::Magnetic: return "magnetic";
  }
  return "?";
}

struct Model {
  ModelParams params;
  BeamPath path;
  SofteningSpec soft;
  HartreeKernelSpec hartree;
};

struct StepConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t snapshot_stride = 1;
  std::size_t potential_quad_nodes = 4;
  EquationForm form = EquationForm::Oscillating;
  bool dealias = false;

  /// Smallest admissible node count for the oscillating potential substep.
  static std::size_t min_quad_nodes(double omega, double dt) {
    return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(std::abs(omega) * dt)));
  }

  std::size_t step_count() const {
    return static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
  }

  std::size_t snapshot_count() const { return step_count() / snapshot_stride + 1; }

  void validate(const BeamPath& path) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("step.dt", "must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
      throw ConfigError("step.t_end", "must be positive");
    if (dt > t_end) throw ConfigError("step.dt", "must not exceed step.t_end");
    if (snapshot_stride < 1) throw ConfigError("step.snapshot_stride", "must be >= 1");
    if (potential_quad_nodes < 2) throw ConfigError("step.potential_quad_nodes", "must be >= 2");
    if (form == EquationForm::Oscillating) {
      path.validate();
      const auto need = min_quad_nodes(path.omega, dt);
      if (potential_quad_nodes < need)
        throw ConfigError("step.potential_quad_nodes",
                          "must be >= max(4, ceil(|omega| dt)) = " + std::to_string(need));
    }
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::size_t> steps;
  std::vector<Field> snapshots;
  std::vector<double> mass_series;
  double dt = 0.0;

  bool empty() const noexcept { return snapshots.empty(); }
  std::size_t size() const noexcept { return snapshots.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }

  void record(std::size_t step, double t, const Field& f) {
    steps.push_back(step);
    times.push_back(t);
    snapshots.push_back(f);
    mass_series.push_back(mass(f));
  }
};

/// One solver instance: owns grid tables, the cached multipliers and scratch buffers.
class Stepper {
 public:
  Stepper(const GridSpec& grid, const Model& model, const StepConfig& cfg)
      : grid_(grid),
        model_(model),
        cfg_(cfg),
        k2_(WaveTable(grid).squared_magnitudes()),
        table_(grid),
        rule_(cfg.potential_quad_nodes),
        phase_(grid.size()) {
    model_.params.validate();
    model_.soft.validate();
    cfg_.validate(model_.path);
    if (cfg_.form == EquationForm::Magnetic) {
      model_.path.validate();
      (void)vector_potential(model_.path, 0.0);  // throws for non-differentiable profiles
    }
    if (model_.params.C1 != 0.0) {
      hartree_.emplace(grid, model_.hartree);
      phi_.resize(grid.size());
    }
    if (cfg_.dealias) {
      mask_.assign(grid.size(), 1.0);
      for (std::size_t f = 0; f < grid.size(); ++f) {
        const auto idx = grid.unflatten(f);
        for (int a = 0; a < grid.dim(); ++a) {
          const auto n = static_cast<long>(grid.points(a));
          long j = static_cast<long>(idx[a]);
          if (j >= n / 2) j -= n;
          if (3 * std::abs(j) > n) mask_[f] = 0.0;
        }
      }
    }
    const auto& p = model_.params;
    const bool static_potential =
        cfg_.form == EquationForm::Magnetic ||
        (cfg_.form == EquationForm::Oscillating && model_.path.stationary()) ||
        (cfg_.form == EquationForm::Averaged && is_constant(model_.path.envelope));
    if (p.c != 0.0 && static_potential) {
      if (cfg_.form == EquationForm::Averaged)
        static_v_ = averaged_potential_values(p, model_.path, model_.soft, 0.0, grid_);
      else
        static_v_ = oscillating_potential_values(p, BeamPath{}, model_.soft, 0.0, grid_);
    }
  }

  const GridSpec& grid() const noexcept { return grid_; }
  const StepConfig& config() const noexcept { return cfg_; }

  /// One Strang step from t to t + dt; dt may be negative.
  void advance(std::span<Complex> u, double t, double dt) {
    potential_half(u, t, t + 0.5 * dt);
    kinetic(u, t, dt);
    potential_half(u, t + 0.5 * dt, t + dt);
  }

 private:
  // u *= exp(-i [int_{t0}^{t1} V dt' + (t1 - t0)(C1 Phi(u) - a |u|^sigma)])
  void potential_half(std::span<Complex> u, double t0, double t1) {
    const double h = t1 - t0;
    const auto& p = model_.params;
    std::fill(phase_.begin(), phase_.end(), 0.0);
    if (p.c != 0.0) {
      if (!static_v_.empty()) {
        for (std::size_t i = 0; i < phase_.size(); ++i) phase_[i] = h * static_v_[i];
      } else if (cfg_.form == EquationForm::Oscillating) {
        for (std::size_t j = 0; j < rule_.size(); ++j) {
          const Vec3 b = beam_displacement(model_.path, rule_.node(t0, t1, j));
          add_soft_coulomb(grid_, b, rule_.weight(t0, t1, j) * p.c, model_.soft.delta, phase_);
        }
      } else {
        for (std::size_t j = 0; j < rule_.size(); ++j) {
          const auto v = averaged_potential_values(p, model_.path, model_.soft,
                                                   rule_.node(t0, t1, j), grid_);
          const double w = rule_.weight(t0, t1, j);
          for (std::size_t i = 0; i < phase_.size(); ++i) phase_[i] += w * v[i];
        }
      }
    }
    if (hartree_) {
      hartree_->potential(u, phi_);
      const double s = h * p.C1;
      for (std::size_t i = 0; i < phase_.size(); ++i) phase_[i] += s * phi_[i];
    }
    if (p.a != 0.0) {
      const double s = h * p.a;
      for (std::size_t i = 0; i < phase_.size(); ++i) phase_[i] -= s * abs_pow(u[i], p.sigma);
    }
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::polar(1.0, -phase_[i]);
  }

  void kinetic(std::span<Complex> u, double t, double dt) {
    fft_forward(grid_, u);
    if (cfg_.form == EquationForm::Magnetic) {
      const Vec3 a = vector_potential(model_.path, t + 0.5 * dt);
      for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec3 k = table_.wavevector(i) + a;
        u[i] *= std::polar(1.0, -norm2(k) * dt);
      }
    } else {
      if (kinetic_dt_ != dt || kinetic_.empty()) {
        kinetic_.resize(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) kinetic_[i] = std::polar(1.0, -k2_[i] * dt);
        kinetic_dt_ = dt;
      }
      apply_multiplier(u, kinetic_);
    }
    if (!mask_.empty())
      for (std::size_t i = 0; i < u.size(); ++i) u[i] *= mask_[i];
    fft_inverse(grid_, u);
  }

  GridSpec grid_;
  Model model_;
  StepConfig cfg_;
  std::vector<double> k2_;
  WaveTable table_;
  GaussLegendre rule_;
  std::optional<HartreeSolver> hartree_;
  std::vector<double> phi_;
  std::vector<double> phase_;
  std::vector<double> static_v_;
  std::vector<double> mask_;
  std::vector<Complex> kinetic_;
  double kinetic_dt_ = 0.0;
};

inline void check_finite(const Field& u, std::size_t step, double t) {
  if (!u.all_finite()) throw DivergenceError(step, t);
}

/// One Strang step of size cfg.dt starting at time t.
inline Field step(const Field& u, double t, const StepConfig& cfg, const Model& model,
                  std::size_t step_index = 1) {
  u.require_space(Space::Physical, "step");
  Stepper stepper(u.grid(), model, cfg);
  Field out = u;
  stepper.advance(out.values(), t, cfg.dt);
  check_finite(out, step_index, t + cfg.dt);
  return out;
}

/// Called at every snapshot with (step index, time, state).
using SnapshotObserver = std::function<void(std::size_t, double, const Field&)>;

/// Integrates from t = 0 to cfg.t_end, invoking `observe` at t = 0 and every
/// snapshot_stride steps thereafter.
inline void integrate(const Field& u0, const StepConfig& cfg, const Model& model,
                      const SnapshotObserver& observe) {
  u0.require_space(Space::Physical, "solve");
  if (!u0.all_finite()) throw ContractViolation("solve: initial datum is not finite");
  Stepper stepper(u0.grid(), model, cfg);
  Field u = u0;
  observe(0, 0.0, u);
  const std::size_t n = cfg.step_count();
  for (std::size_t s = 1; s <= n; ++s) {
    const double t = static_cast<double>(s - 1) * cfg.dt;
    stepper.advance(u.values(), t, cfg.dt);
    const double t_next = static_cast<double>(s) * cfg.dt;
    check_finite(u, s, t_next);
    if (s % cfg.snapshot_stride == 0) observe(s, t_next, u);
  }
}

inline Trajectory solve(const Field& u0, const StepConfig& cfg, const Model& model) {
  Trajectory traj;
  traj.dt = cfg.dt;
  integrate(u0, cfg, model, [&](std::size_t s, double t, const Field& u) { traj.record(s, t, u); });
  return traj;
}

struct GaugeComparison {
  Trajectory psi;
  Trajectory u;
  std::vector<double> deviations;
  double max_deviation = 0.0;
};

/// Runs the magnetic equation for psi and the oscillating equation for u from gauge-matched
/// data, and measures ||psi(t) - exp(-i Theta(t)) u(t, . - b(t))|| at every snapshot.
///
/// With u(t, x) = psi(t, x + b(t)) e^{i Theta}, a nucleus fixed at the origin in the psi frame
/// sits at -b(t) in the u frame, so the u run uses the reflected path.
inline GaugeComparison solve_magnetic_and_compare(const Field& psi0, const StepConfig& cfg,
                                                  const Model& model) {
  StepConfig mag_cfg = cfg;
  mag_cfg.form = EquationForm::Magnetic;
  StepConfig osc_cfg = cfg;
  osc_cfg.form = EquationForm::Oscillating;
  Model u_model = model;
  u_model.path = reflected(model.path);

  GaugeComparison out;
  out.psi = solve(psi0, mag_cfg, model);
  const Field u0 = gauge_u_from_psi(psi0, model.path, 0.0, 0.0);
  out.u = solve(u0, osc_cfg, u_model);

  double theta = 0.0;
  double t_prev = 0.0;
  for (std::size_t j = 0; j < out.psi.size(); ++j) {
    const double t = out.psi.times[j];
    // Theta accumulated panel-wise between snapshots.
    if (t != t_prev) {
      theta += gauge_phase_between(model.path, t_prev, t, cfg.dt);
      t_prev = t;
    }
    const Field mapped = gauge_psi_from_u(out.u.snapshots[j], model.path, t, theta);
    const double d = l2_norm(out.psi.snapshots[j] - mapped);
    out.deviations.push_back(d);
    out.max_deviation = std::max(out.max_deviation, d);
  }
  return out;
}

}  // namespace xfelnls
