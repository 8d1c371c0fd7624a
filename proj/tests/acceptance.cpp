// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance            all criteria; the omega-sweep exhibit uses the 1D preset
//   acceptance --full-3d  additionally runs the omega-sweep exhibit on the 48^3 preset

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace xfelnls;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

RunConfig config_from(const std::string& preset, const std::string& overrides) {
  KeyValueConfig kv;
  std::istringstream base(preset_text(preset));
  kv.merge(base, "preset");
  std::istringstream extra(overrides);
  kv.merge(extra, "overrides");
  return build_run_config(kv);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// 1. Mass conservation for the full model on 48^3.
Outcome mass_conservation() {
  const auto rc = config_from("desk-3d",
                              "soft.delta = 0.2\nstep.dt = 1e-3\nstep.t_end = 1\n"
                              "step.snapshot_stride = 50\npath.omega = 32\n");
  const Field u0 = rc.initial_field();
  const double m0 = mass(u0);
  double drift = 0.0;
  integrate(u0, rc.step, rc.model, [&](std::size_t, double, const Field& u) {
    drift = std::max(drift, std::abs(mass(u) - m0) / m0);
  });
  return {drift <= 1e-8, "max relative mass drift " + sci(drift) + " (tol 1e-8)"};
}

// 2. Free evolution against the exact Gaussian solution.
Outcome free_evolution() {
  const auto rc = config_from("ci-1d",
                              "grid.points = 512\ngrid.extent = 80\nmodel.c = 0\nmodel.C1 = 0\n"
                              "model.a = 0\nstep.dt = 0.01\nstep.snapshot_stride = 10\n");
  double worst = 0.0;
  integrate(rc.initial_field(), rc.step, rc.model, [&](std::size_t, double t, const Field& u) {
    const Field exact = oracles::free_gaussian(rc.grid, 1.0, t);
    worst = std::max(worst, l2_norm(u - exact) / l2_norm(exact));
  });
  return {worst <= 1e-8, "max relative L2 error " + sci(worst) + " (tol 1e-8)"};
}

// 3. Strang self-convergence order with a static soft Coulomb potential.
Outcome splitting_order() {
  std::vector<Field> finals;
  for (const char* dt : {"4e-3", "2e-3", "1e-3"}) {
    const auto rc = config_from("desk-3d",
                                std::string("grid.points = 32\npath.e0 = 0, 0, 0\nmodel.C1 = 0\n"
                                            "model.a = 0\nstep.t_end = 1\nstep.snapshot_stride = 1\n"
                                            "init.momentum = 1, 0.5, 0\nstep.dt = ") +
                                    dt + "\n");
    Field u = rc.initial_field();
    integrate(u, rc.step, rc.model, [&](std::size_t, double, const Field& f) { u = f; });
    finals.push_back(u);
  }
  const double e1 = l2_norm(finals[0] - finals[1]);
  const double e2 = l2_norm(finals[1] - finals[2]);
  const double order = std::log2(e1 / e2);
  return {order >= 1.8 && order <= 2.2, "self-convergence order " + fmt17(order) + " (band [1.8, 2.2])"};
}

// 4. Hartree potential of a Gaussian density against the periodic closed form.
Outcome hartree_oracle() {
  const double L = 16.0;
  const auto grid = GridSpec::cube(3, L, 64);
  const Field u = Field::sample(grid, [](const Vec3& x) { return Complex(std::exp(-norm2(x) / 2.0), 0.0); });
  const Field phi = hartree_potential(u, default_hartree_spec(3));
  const oracles::EwaldRemainder R(L);
  double diff = 0.0, scale = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const Vec3 x = grid.position(f);
    if (norm2(x) > 16.0) continue;
    const double o = oracles::periodic_gaussian_hartree(R, L, x);
    diff = std::max(diff, std::abs(phi[f].real() - o));
    scale = std::max(scale, std::abs(o));
  }
  const double rel = diff / scale;
  return {rel <= 1e-6, "max relative error for |x| <= 4: " + sci(rel) + " (tol 1e-6)"};
}

// 5. Magnetic run against the gauge-mapped moving-nucleus run; and with A = 0.
Outcome gauge_equivalence() {
  const std::string common =
      "grid.extent = 8\nsoft.delta = 0.4\nmodel.C1 = 0\nmodel.a = 0\npath.omega = 16\n"
      "step.t_end = 0.5\nstep.dt = 2.5e-4\nstep.snapshot_stride = 200\n";
  const auto rc = config_from("desk-3d", common);
  const double dev = cmd_verify_gauge(rc, false).max_deviation;
  // without the beam the two runs are identical for any step size
  const auto rc0 = config_from("desk-3d", common + "path.e0 = 0, 0, 0\nstep.dt = 1e-3\nstep.snapshot_stride = 50\n");
  const double dev0 = cmd_verify_gauge(rc0, false).max_deviation;
  return {dev <= 1e-5 && dev0 <= 1e-10,
          "max deviation " + sci(dev) + " (tol 1e-5); with A = 0: " + sci(dev0) + " (tol 1e-10)"};
}

// 6. Uniform averaging residual decays like 1/omega.
Outcome averaging_rate() {
  const auto rc = config_from("ci-1d",
                              "averaging.zeta = gaussian\naveraging.width = 1\naveraging.T = 2\n"
                              "averaging.omegas = 8, 16, 32, 64, 128, 256\n");
  const auto rep = cmd_verify_averaging(rc, rc.averaging.omegas, false);
  if (!rep.fit) return {false, "residuals vanished; slope undefined"};
  const double slope = rep.fit->slope;
  const double r8 = rep.residuals.front(), r256 = rep.residuals.back();
  return {slope >= -1.3 && slope <= -0.7 && r256 <= r8 / 16.0,
          "slope " + fmt17(slope) + " (band [-1.3, -0.7]); residual(256)/residual(8) = " +
              sci(r256 / r8) + " (tol 1/16)"};
}

// 7. Difference norms decrease monotonically in omega, by at least 0.8 per doubling.
Outcome sweep_exhibit(const std::string& preset) {
  const auto rc = config_from(preset, "sweep.omegas = 8, 16, 32, 64\nstep.t_end = 1\n");
  const auto res = cmd_sweep_omega(rc, rc.sweep_omegas, 1, false);
  bool ok = true;
  double worst_ratio = 0.0;
  for (std::size_t p = 0; p < res.pairs.size(); ++p) {
    ok = ok && res.strictly_decreasing(p);
    worst_ratio = std::max(worst_ratio, res.max_step_ratio(p));
  }
  ok = ok && worst_ratio <= 0.8;
  return {ok, preset + ": all four pairs strictly decreasing = " + (ok ? "yes" : "no") +
                  ", worst doubling ratio " + fmt17(worst_ratio) + " (tol 0.8)"};
}

// 8. Degenerate paths: oscillating and averaged solutions coincide.
Outcome degenerate_consistency() {
  double worst = 0.0;
  for (const char* o : {"path.e0 = 0, 0, 0\n", "model.c = 0\n"}) {
    const auto rc = config_from("ci-1d", std::string("sweep.omegas = 8, 16, 32, 64\n") + o);
    const auto res = cmd_sweep_omega(rc, rc.sweep_omegas, 1, false);
    for (const auto& row : res.values)
      for (double v : row) worst = std::max(worst, std::isfinite(v) ? v : 1.0);
  }
  return {worst <= 1e-9, "max difference norm " + sci(worst) + " (tol 1e-9)"};
}

// 9. Admissibility on the 4 x 4 exponent grid.
Outcome admissibility_table() {
  const std::vector<double> qs{2.0, 8.0 / 3.0, 4.0, kInf};
  const std::vector<double> rs{2.0, 3.0, 4.0, 6.0};
  std::vector<AdmissiblePair> found;
  for (double q : qs)
    for (double r : rs)
      if (is_admissible(q, r)) found.push_back({q, r});
  auto expected = default_pairs();
  auto key = [](const AdmissiblePair& p) { return p.r; };
  std::sort(found.begin(), found.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
  std::sort(expected.begin(), expected.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
  const bool ok = found == expected;
  return {ok, std::to_string(found.size()) + " admissible pairs found, expected exactly 4"};
}

}  // namespace

int main(int argc, char** argv) {
  const bool full_3d = argc > 1 && std::strcmp(argv[1], "--full-3d") == 0;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {"AC1 mass conservation", mass_conservation},
      {"AC2 free evolution", free_evolution},
      {"AC3 splitting order", splitting_order},
      {"AC4 hartree oracle", hartree_oracle},
      {"AC5 gauge equivalence", gauge_equivalence},
      {"AC6 averaging rate", averaging_rate},
      {"AC7 omega sweep", [] { return sweep_exhibit("ci-1d"); }},
      {"AC8 degenerate consistency", degenerate_consistency},
      {"AC9 admissibility table", admissibility_table},
  };
  if (full_3d) criteria.push_back({"AC7 omega sweep (3D)", [] { return sweep_exhibit("desk-3d"); }});

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %-28s %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
