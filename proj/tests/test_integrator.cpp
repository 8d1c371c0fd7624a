#include "oracles.hpp"
#include "test_support.hpp"

using namespace xfelnls;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Model full_model(double omega) {
  Model m;
  m.params = {1.0, 1.0, 1.0, 2.0 / 3.0, true};
  m.path.envelope = ConstantEnvelope{{1.0, 0.0, 0.0}};
  m.path.omega = omega;
  m.soft = {0.5, 64};
  m.hartree = default_hartree_spec(1);
  return m;
}

Model linear_model(double omega) {
  Model m = full_model(omega);
  m.params.C1 = 0.0;
  m.params.a = 0.0;
  return m;
}

StepConfig config(double dt, double t_end, std::size_t stride, double omega,
                  EquationForm form = EquationForm::Oscillating) {
  StepConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_stride = stride;
  c.form = form;
  c.potential_quad_nodes = StepConfig::min_quad_nodes(omega, dt);
  return c;
}

Field gaussian(const GridSpec& g, double k0 = 0.0) {
  GaussianDatum d;
  d.momentum = {k0, 0.0, 0.0};
  return gaussian_datum(g, d);
}

}  // namespace

TEST_CASE("free step applies the exact plane-wave phase", "[integrator]") {
  const auto g = GridSpec::cube(1, 2.0 * std::numbers::pi, 32);
  const double k0 = 5.0, dt = 0.013;
  const Field u = Field::sample(g, [&](const Vec3& x) { return std::exp(Complex(0.0, k0 * x[0])); });
  const Field v = step(u, 0.0, config(dt, 1.0, 1, 1.0), Model{});
  const Complex phase = std::polar(1.0, -k0 * k0 * dt);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(v[i] - phase * u[i]) < 1e-13);
}

TEST_CASE("free Gaussian follows the closed-form evolution", "[integrator][oracle]") {
  const auto g = GridSpec::cube(1, 80.0, 512);
  const Field u0 = gaussian(g, 0.5);
  double worst = 0.0;
  integrate(u0, config(0.02, 1.0, 5, 1.0), Model{}, [&](std::size_t, double t, const Field& u) {
    // moving packet: shift the centered solution by 2 k0 t and apply the momentum phase
    const double k0 = 0.5;
    const Complex s2t(1.0, 2.0 * t);
    const Field exact = Field::sample(g, [&](const Vec3& x) {
      const double y = x[0] - 2.0 * k0 * t;
      return std::pow(std::numbers::pi, -0.25) * std::pow(1.0 / s2t, 0.5) *
             std::exp(-y * y / (2.0 * s2t) + Complex(0.0, k0 * x[0] - k0 * k0 * t));
    });
    worst = std::max(worst, l2_norm(u - exact));
  });
  CHECK(worst <= 1e-8);

  const Field at_rest = oracles::free_gaussian(g, 1.0, 0.0);
  CHECK(l2_norm(at_rest - gaussian(g)) < 1e-14);
}

TEST_CASE("time-independent potential converges at second order", "[integrator][oracle]") {
  const auto g = GridSpec::cube(1, 32.0, 256);
  Model m = linear_model(1.0);
  m.path.envelope = ConstantEnvelope{};
  const Field u0 = gaussian(g, 1.0);
  std::vector<Field> finals;
  for (double dt : {4e-3, 2e-3, 1e-3, 5e-4}) {
    Field last = u0;
    integrate(u0, config(dt, 1.0, 1, 1.0), m, [&](std::size_t, double, const Field& u) { last = u; });
    finals.push_back(last);
  }
  const double order1 = std::log2(l2_norm(finals[0] - finals[1]) / l2_norm(finals[1] - finals[2]));
  const double order2 = std::log2(l2_norm(finals[1] - finals[2]) / l2_norm(finals[2] - finals[3]));
  CHECK(order1 >= 1.8);
  CHECK(order1 <= 2.2);
  CHECK(order2 >= 1.8);
  CHECK(order2 <= 2.2);
}

TEST_CASE("zero datum stays zero", "[integrator]") {
  const auto g = GridSpec::cube(1, 16.0, 64);
  const auto traj = solve(Field(g), config(0.01, 0.5, 10, 32.0), full_model(32.0));
  CHECK(traj.size() == 6);
  for (const auto& s : traj.snapshots) CHECK(support::max_abs(s) == 0.0);
}

TEST_CASE("mass is conserved for free and full dynamics", "[integrator][property]") {
  const auto g = GridSpec::cube(1, 32.0, 256);
  const auto free_traj = solve(gaussian(g), config(0.01, 1.0, 10, 1.0), Model{});
  for (double m : free_traj.mass_series) CHECK_THAT(m, WithinRel(free_traj.mass_series.front(), 1e-10));

  for (auto form : {EquationForm::Oscillating, EquationForm::Averaged, EquationForm::Magnetic}) {
    const auto traj = solve(gaussian(g, 0.7), config(1e-3, 1.0, 50, 32.0, form), full_model(32.0));
    for (double m : traj.mass_series) CHECK_THAT(m, WithinRel(traj.mass_series.front(), 1e-10));
  }
}

TEST_CASE("trajectory records snapshots at stride boundaries", "[integrator]") {
  const auto g = GridSpec::cube(1, 16.0, 64);
  const Field u0 = gaussian(g);
  const auto cfg = config(0.01, 1.0, 7, 32.0);
  const auto traj = solve(u0, cfg, full_model(32.0));
  CHECK(cfg.step_count() == 100);
  CHECK(cfg.snapshot_count() == 100 / 7 + 1);
  CHECK(traj.size() == cfg.snapshot_count());
  CHECK(traj.times.front() == 0.0);
  CHECK(support::max_abs_diff(traj.snapshots.front(), u0) == 0.0);
  for (std::size_t j = 0; j < traj.size(); ++j) {
    CHECK(traj.steps[j] == 7 * j);
    CHECK_THAT(traj.times[j], WithinAbs(0.07 * j, 1e-14));
    CHECK(traj.mass_series[j] == std::pow(l2_norm(traj.snapshots[j]), 2.0));
  }
}

TEST_CASE("stepping forward then backward returns the datum", "[integrator][property]") {
  const auto g = GridSpec::cube(1, 32.0, 256);
  const Model m = linear_model(24.0);
  const auto cfg = config(2e-3, 1.0, 1, 24.0);
  Stepper stepper(g, m, cfg);
  const Field u0 = gaussian(g, 1.0);
  Field u = u0;
  const int n = 200;
  for (int s = 0; s < n; ++s) stepper.advance(u.values(), s * cfg.dt, cfg.dt);
  for (int s = n; s > 0; --s) stepper.advance(u.values(), s * cfg.dt, -cfg.dt);
  CHECK(l2_norm(u - u0) <= 1e-8);
}

TEST_CASE("potential quadrature is converged at the enforced minimum", "[integrator][property]") {
  const auto g = GridSpec::cube(1, 32.0, 256);
  const Model m = full_model(64.0);
  auto cfg = config(4e-3, 0.5, 125, 64.0);
  const auto base = solve(gaussian(g), cfg, m);
  cfg.potential_quad_nodes += 8;
  const auto finer = solve(gaussian(g), cfg, m);
  CHECK(l2_norm(base.snapshots.back() - finer.snapshots.back()) <= 1e-9);
}

TEST_CASE("step configuration validation", "[integrator]") {
  const auto path = full_model(100.0).path;
  auto cfg = config(0.05, 1.0, 1, 100.0);
  CHECK(cfg.potential_quad_nodes == 5);
  CHECK_NOTHROW(cfg.validate(path));
  cfg.potential_quad_nodes = 4;
  CHECK_THROWS_AS(cfg.validate(path), ConfigError);
  cfg.form = EquationForm::Averaged;
  CHECK_NOTHROW(cfg.validate(path));
  CHECK_THROWS_AS(config(2.0, 1.0, 1, 1.0).validate(path), ConfigError);
  CHECK_THROWS_AS(config(-0.1, 1.0, 1, 1.0).validate(path), ConfigError);
  CHECK_THROWS_AS(config(0.1, 1.0, 0, 1.0).validate(path), ConfigError);
  CHECK(StepConfig::min_quad_nodes(10.0, 0.01) == 4);
  CHECK(StepConfig::min_quad_nodes(-1000.0, 0.01) == 10);
}

TEST_CASE("magnetic form rejects non-differentiable profiles", "[integrator]") {
  const auto g = GridSpec::cube(1, 16.0, 64);
  Model m = linear_model(8.0);
  m.path.profile = Profile::Triangle;
  CHECK_THROWS_AS(Stepper(g, m, config(0.01, 1.0, 1, 8.0, EquationForm::Magnetic)), UnsupportedConfiguration);
  CHECK_NOTHROW(Stepper(g, m, config(0.01, 1.0, 1, 8.0, EquationForm::Oscillating)));
}

TEST_CASE("non-finite states raise a divergence error with the step index", "[integrator]") {
  const auto g = GridSpec::cube(1, 16.0, 64);
  Field bad = gaussian(g);
  bad[10] = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  try {
    (void)step(bad, 0.5, config(0.01, 1.0, 1, 32.0), full_model(32.0), 17);
    FAIL("expected a divergence error");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == 17);
    CHECK_THAT(e.time(), WithinAbs(0.51, 1e-15));
  }
  CHECK_THROWS_AS(solve(bad, config(0.01, 1.0, 1, 32.0), full_model(32.0)), ContractViolation);
}

TEST_CASE("stationary nucleus: oscillating and averaged forms agree", "[integrator]") {
  const auto g = GridSpec::cube(1, 32.0, 256);
  Model m = full_model(40.0);
  m.path.envelope = ConstantEnvelope{};
  const auto a = solve(gaussian(g, 0.3), config(2e-3, 0.5, 50, 40.0, EquationForm::Oscillating), m);
  const auto b = solve(gaussian(g, 0.3), config(2e-3, 0.5, 50, 40.0, EquationForm::Averaged), m);
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(l2_norm(a.snapshots[j] - b.snapshots[j]) <= 1e-12);
}

TEST_CASE("solves are deterministic", "[integrator][property]") {
  const auto g = GridSpec::cube(2, 12.0, 32);
  Model m = full_model(16.0);
  m.hartree = default_hartree_spec(2);
  const auto cfg = config(5e-3, 0.2, 10, 16.0);
  const auto a = solve(gaussian(g, 0.4), cfg, m);
  const auto b = solve(gaussian(g, 0.4), cfg, m);
  for (std::size_t j = 0; j < a.size(); ++j)
    CHECK(std::memcmp(a.snapshots[j].values().data(), b.snapshots[j].values().data(),
                      a.snapshots[j].size() * sizeof(Complex)) == 0);
}

TEST_CASE("gauge comparison: no vector potential", "[integrator][gauge]") {
  const auto g = GridSpec::cube(1, 32.0, 256);
  Model m = full_model(16.0);
  m.path.envelope = ConstantEnvelope{};
  const auto cmp = solve_magnetic_and_compare(gaussian(g, 0.5), config(1e-3, 0.5, 50, 16.0), m);
  CHECK(cmp.max_deviation <= 1e-10);
  CHECK(cmp.deviations.size() == 11);
}

TEST_CASE("gauge comparison: constant vector potential, free dynamics", "[integrator][gauge]") {
  const auto g = GridSpec::cube(2, 24.0, 64);
  Model m;
  m.path.envelope = PolynomialEnvelope{{{0.0, 0.0, 0.0}, {1.2, -0.6, 0.0}}};
  m.path.profile = Profile::One;
  m.path.omega = 1.0;
  const auto cmp = solve_magnetic_and_compare(gaussian(g), config(5e-3, 1.0, 20, 1.0), m);
  CHECK(cmp.max_deviation <= 1e-8);
}

TEST_CASE("gauge comparison: oscillating path in 1D converges with dt", "[integrator][gauge]") {
  const auto g = GridSpec::cube(1, 32.0, 256);
  const Model m = full_model(16.0);
  const double coarse = solve_magnetic_and_compare(gaussian(g), config(2e-3, 0.5, 25, 16.0), m).max_deviation;
  const double fine = solve_magnetic_and_compare(gaussian(g), config(1e-3, 0.5, 50, 16.0), m).max_deviation;
  CHECK(fine < coarse / 3.0);
  CHECK(fine <= 1e-3);
}
