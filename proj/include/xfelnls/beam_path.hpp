#pragma once

// Oscillating beam path b(t) = e(t) f(omega t) and the associated vector
// potential A(t) = (1/2) db/dt.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace xfelnls {

struct ConstantEnvelope {
  Vec3 e0{0.0, 0.0, 0.0};
};

/// e(t) = sum_j coeffs[j] t^j
struct PolynomialEnvelope {
  std::vector<Vec3> coeffs;
};

/// e(t) = e0 + e1 cos(nu t)
struct HarmonicEnvelope {
  Vec3 e0{0.0, 0.0, 0.0};
  Vec3 e1{0.0, 0.0, 0.0};
  double nu = 1.0;
};

using Envelope = std::variant<ConstantEnvelope, PolynomialEnvelope, HarmonicEnvelope>;

/// 2 pi-periodic profiles. `Triangle` is continuous but has kinks, so it has no
/// derivative and cannot drive a vector potential.
enum class Profile { Sin, Cos, One, Triangle };

inline Vec3 operator*(double s, const Vec3& v) { return {s * v[0], s * v[1], s * v[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }

inline Vec3 envelope_value(const Envelope& env, double t) {
  return std::visit(
      [t](const auto& e) -> Vec3 {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, ConstantEnvelope>) {
          return e.e0;
        } else if constexpr (std::is_same_v<E, PolynomialEnvelope>) {
          Vec3 acc{0.0, 0.0, 0.0};
          for (auto it = e.coeffs.rbegin(); it != e.coeffs.rend(); ++it) acc = t * acc + *it;
          return acc;
        } else {
          return e.e0 + std::cos(e.nu * t) * e.e1;
        }
      },
      env);
}

inline Vec3 envelope_derivative(const Envelope& env, double t) {
  return std::visit(
      [t](const auto& e) -> Vec3 {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, ConstantEnvelope>) {
          return {0.0, 0.0, 0.0};
        } else if constexpr (std::is_same_v<E, PolynomialEnvelope>) {
          Vec3 acc{0.0, 0.0, 0.0};
          for (std::size_t j = e.coeffs.size(); j-- > 1;)
            acc = t * acc + static_cast<double>(j) * e.coeffs[j];
          return acc;
        } else {
          return (-e.nu * std::sin(e.nu * t)) * e.e1;
        }
      },
      env);
}

inline Envelope negated(const Envelope& env) {
  return std::visit(
      [](auto e) -> Envelope {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, ConstantEnvelope>) {
          e.e0 = -1.0 * e.e0;
        } else if constexpr (std::is_same_v<E, PolynomialEnvelope>) {
          for (auto& c : e.coeffs) c = -1.0 * c;
        } else {
          e.e0 = -1.0 * e.e0;
          e.e1 = -1.0 * e.e1;
        }
        return e;
      },
      env);
}

inline bool is_constant(const Envelope& env) {
  if (std::holds_alternative<ConstantEnvelope>(env)) return true;
  if (const auto* p = std::get_if<PolynomialEnvelope>(&env)) {
    for (std::size_t j = 1; j < p->coeffs.size(); ++j)
      if (norm2(p->coeffs[j]) != 0.0) return false;
    return true;
  }
  const auto& h = std::get<HarmonicEnvelope>(env);
  return norm2(h.e1) == 0.0 || h.nu == 0.0;
}

inline double profile_value(Profile p, double tau) {
  switch (p) {
    case Profile::Sin: return std::sin(tau);
    case Profile::Cos: return std::cos(tau);
    case Profile::One: return 1.0;
    case Profile::Triangle: return (2.0 / std::numbers::pi) * std::asin(std::sin(tau));
  }
  return 0.0;
}

inline std::optional<double> profile_derivative(Profile p, double tau) {
  switch (p) {
    case Profile::Sin: return std::cos(tau);
    case Profile::Cos: return -std::sin(tau);
    case Profile::One: return 0.0;
    case Profile::Triangle: return std::nullopt;
  }
  return std::nullopt;
}

inline std::string to_string(Profile p) {
  switch (p) {
    case Profile::Sin: return "sin";
    case Profile::Cos: return "cos";
    case Profile::One: return "one";
    case Profile::Triangle: return "triangle";
  }
  return "?";
}

struct BeamPath {
  Envelope envelope = ConstantEnvelope{};
  Profile profile = Profile::Sin;
  double omega = 1.0;

  void validate() const {
    if (!(omega != 0.0) || !std::isfinite(omega))
      throw ContractViolation("BeamPath: omega must be nonzero and finite");
  }

  bool stationary() const { return is_constant(envelope) && norm2(envelope_value(envelope, 0.0)) == 0.0; }
};

/// b(t) = e(t) f(omega t)
inline Vec3 beam_displacement(const BeamPath& path, double t) {
  return profile_value(path.profile, path.omega * t) * envelope_value(path.envelope, t);
}

/// A(t) = (1/2) [e'(t) f(omega t) + omega e(t) f'(omega t)]
inline Vec3 vector_potential(const BeamPath& path, double t) {
  const auto fp = profile_derivative(path.profile, path.omega * t);
  if (!fp) throw UnsupportedConfiguration("vector_potential: profile '" + to_string(path.profile) +
                                          "' is not differentiable");
  const double f = profile_value(path.profile, path.omega * t);
  return 0.5 * (f * envelope_derivative(path.envelope, t) +
                (path.omega * *fp) * envelope_value(path.envelope, t));
}

/// Same path with b replaced by -b.
inline BeamPath reflected(BeamPath path) {
  path.envelope = negated(path.envelope);
  return path;
}

}  // namespace xfelnls
