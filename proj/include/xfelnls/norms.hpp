#pragma once

// Strichartz-admissible exponent pairs in three dimensions and discrete mixed
// space-time norms L^q_t L^r_x over stored trajectories.

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "integrator.hpp"

namespace xfelnls {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Reciprocal with 1/inf == 0.
inline double reciprocal(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

/// 2 <= q <= inf, 2 <= r <= 6 and 1/q == (3/2)(1/2 - 1/r) to 1e-12.
inline bool is_admissible(double q, double r) {
  if (std::isnan(q) || std::isnan(r)) return false;
  if (!(q >= 2.0) || !(r >= 2.0 && r <= 6.0)) return false;
  return std::abs(reciprocal(q) - 1.5 * (0.5 - reciprocal(r))) <= 1e-12;
}

struct AdmissiblePair {
  double q = kInf;
  double r = 2.0;

  friend bool operator==(const AdmissiblePair&, const AdmissiblePair&) = default;
};

inline std::string format_exponent(double p) {
  if (std::isinf(p)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

/// The pair set used to approximate the supremum over all admissible pairs.
inline std::vector<AdmissiblePair> default_pairs() {
  return {{kInf, 2.0}, {4.0, 3.0}, {8.0 / 3.0, 4.0}, {2.0, 6.0}};
}

enum class NormMode { Strict, Raw };

/// (prod h_i * sum |f|^r)^{1/r}; r = inf gives max |f|.
inline double spatial_lr_norm(const Field& f, double r) {
  f.require_space(Space::Physical, "spatial_lr_norm");
  if (!(r >= 1.0)) throw ContractViolation("spatial_lr_norm: r must be >= 1");
  if (std::isinf(r)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (r == 2.0) {
    for (const auto& v : f.values()) s += std::norm(v);
    return std::sqrt(f.grid().cell_volume() * s);
  }
  for (const auto& v : f.values()) s += std::pow(std::abs(v), r);
  return std::pow(f.grid().cell_volume() * s, 1.0 / r);
}

/// Composite-trapezoid L^q norm over [times.front(), times.back()] of sampled values;
/// q = inf gives the maximum.
inline double time_lq_norm(const std::vector<double>& times, const std::vector<double>& values,
                           double q) {
  if (times.size() != values.size() || times.empty())
    throw ContractViolation("time_lq_norm: need matching, nonempty samples");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
  }
  double s = 0.0;
  for (std::size_t j = 1; j < times.size(); ++j)
    s += 0.5 * (times[j] - times[j - 1]) * (std::pow(values[j - 1], q) + std::pow(values[j], q));
  return std::pow(s, 1.0 / q);
}

struct MixedNormReport {
  AdmissiblePair pair;
  double value = 0.0;
  double horizon = 0.0;
};

inline void check_pair(const AdmissiblePair& pair, NormMode mode) {
  if (mode == NormMode::Strict && !is_admissible(pair.q, pair.r))
    throw ContractViolation("mixed_norm: (" + format_exponent(pair.q) + ", " +
                            format_exponent(pair.r) + ") is not an admissible pair");
  if (mode == NormMode::Raw && (!(pair.q >= 1.0) || !(pair.r >= 1.0)))
    throw ContractViolation("mixed_norm: exponents must be >= 1");
}

inline MixedNormReport mixed_norm(const Trajectory& traj, const AdmissiblePair& pair,
                                  NormMode mode = NormMode::Strict) {
  if (traj.empty()) throw ContractViolation("mixed_norm: empty trajectory");
  check_pair(pair, mode);
  std::vector<double> spatial;
  spatial.reserve(traj.size());
  for (const auto& f : traj.snapshots) spatial.push_back(spatial_lr_norm(f, pair.r));
  return {pair, time_lq_norm(traj.times, spatial, pair.q), traj.horizon()};
}

/// Max of mixed_norm over a finite pair set.
inline double s_norm(const Trajectory& traj, const std::vector<AdmissiblePair>& pairs) {
  if (pairs.empty()) throw ContractViolation("s_norm: empty pair set");
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, mixed_norm(traj, p).value);
  return m;
}

/// Snapshot-wise a - b. Times must match exactly.
inline Trajectory difference(const Trajectory& a, const Trajectory& b) {
  if (a.times != b.times)
    throw ContractViolation("difference: trajectories are not sampled at matched times");
  Trajectory d;
  d.dt = a.dt;
  for (std::size_t j = 0; j < a.size(); ++j)
    d.record(a.steps[j], a.times[j], a.snapshots[j] - b.snapshots[j]);
  return d;
}

}  // namespace xfelnls
