#pragma once

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace xfelnls {

/// n-point Gauss-Legendre rule on [-1, 1], tabulated by GSL.
class GaussLegendre {
 public:
  explicit GaussLegendre(std::size_t n) : nodes_(n), weights_(n) {
    if (n < 1) throw ContractViolation("GaussLegendre: need at least one node");
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
    if (t == nullptr) throw ContractViolation("GaussLegendre: table allocation failed");
    for (std::size_t i = 0; i < n; ++i)
      gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes_[i], &weights_[i], t);
    gsl_integration_glfixed_table_free(t);
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Node i mapped to [a, b]. Works for b < a (reversed interval).
  double node(double a, double b, std::size_t i) const noexcept {
    return 0.5 * (a + b) + 0.5 * (b - a) * nodes_[i];
  }
  /// Weight i on [a, b]; negative when b < a.
  double weight(double a, double b, std::size_t i) const noexcept {
    return 0.5 * (b - a) * weights_[i];
  }

  template <class Fn>
  double integrate(double a, double b, Fn&& fn) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += weight(a, b, i) * fn(node(a, b, i));
    return s;
  }

  /// Composite rule with `panels` equal panels.
  template <class Fn>
  double integrate(double a, double b, std::size_t panels, Fn&& fn) const {
    const double h = (b - a) / static_cast<double>(panels);
    double s = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
      const double lo = a + static_cast<double>(p) * h;
      s += integrate(lo, lo + h, fn);
    }
    return s;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Number of equal panels of width at most `max_width` covering |b - a|.
inline std::size_t panels_for(double a, double b, double max_width) {
  const double len = std::abs(b - a);
  if (len == 0.0) return 0;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_width - 1e-12)));
}

}  // namespace xfelnls
