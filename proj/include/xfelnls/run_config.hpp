#pragma once

// Typed run configuration assembled from a KeyValueConfig, plus the shipped
// presets. See README.md for the full key list.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "averaging.hpp"
#include "config.hpp"
#include "norms.hpp"
#include "snapshot_io.hpp"

namespace xfelnls {

struct GaussianDatum {
  Vec3 center{0.0, 0.0, 0.0};
  double width = 1.0;
  Vec3 momentum{0.0, 0.0, 0.0};
};

struct FileDatum {
  std::filesystem::path path;
};

using InitialDatum = std::variant<GaussianDatum, FileDatum>;

/// Unit-mass Gaussian (pi s^2)^{-d/4} exp(-|x - x0|^2 / (2 s^2) + i k0.x).
inline Field gaussian_datum(const GridSpec& grid, const GaussianDatum& g) {
  const double norm = std::pow(std::numbers::pi * g.width * g.width, -0.25 * grid.dim());
  return Field::sample(grid, [&](const Vec3& x) {
    const Vec3 d = x - g.center;
    return norm * std::exp(Complex(-norm2(d) / (2.0 * g.width * g.width), dot(g.momentum, x)));
  });
}

struct AveragingOptions {
  TestFunctionSpec zeta;
  double horizon = 2.0;
  std::vector<double> omegas{8, 16, 32, 64, 128, 256};
  ResidualLattice lattice;
};

struct RunConfig {
  GridSpec grid = GridSpec::cube(1, 32.0, 256);
  Model model;
  StepConfig step;
  InitialDatum initial = GaussianDatum{};
  std::filesystem::path output_dir = "out";
  unsigned long long seed = 0;
  bool save_snapshots = true;
  std::vector<double> sweep_omegas{8, 16, 32, 64};
  std::vector<AdmissiblePair> pairs = default_pairs();
  AveragingOptions averaging;
  KeyValueConfig source;  // merged key-value input, echoed into manifests
  std::vector<std::string> warnings;

  Field initial_field() const {
    if (const auto* g = std::get_if<GaussianDatum>(&initial)) return gaussian_datum(grid, *g);
    const auto& file = std::get<FileDatum>(initial);
    Field f = read_nlsf(file.path);
    if (!(f.grid() == grid)) throw ConfigError("init.file", "snapshot grid does not match grid.*");
    if (f.space() != Space::Physical) f = inverse_transform(std::move(f));
    if (!f.all_finite()) throw ConfigError("init.file", "initial datum is not finite");
    return f;
  }
};

inline std::string preset_text(const std::string& name) {
  if (name == "ci-1d")
    return R"(grid.dim = 1
grid.extent = 32
grid.points = 256
model.c = 1
model.C1 = 1
model.a = 1
model.sigma = 2/3
model.global_certified = true
path.envelope = constant
path.e0 = 1, 0, 0
path.profile = sin
path.omega = 32
soft.delta = 0.5
soft.quad_points = 64
step.dt = 0.001
step.t_end = 1
step.snapshot_stride = 10
step.form = oscillating
init.kind = gaussian
init.width = 1
sweep.omegas = 8, 16, 32, 64
)";
  if (name == "desk-3d")
    return R"(grid.dim = 3
grid.extent = 9.6
grid.points = 48
model.c = 1
model.C1 = 1
model.a = 1
model.sigma = 2/3
model.global_certified = true
path.envelope = constant
path.e0 = 1, 0, 0
path.profile = sin
path.omega = 32
soft.delta = 0.4
soft.quad_points = 64
step.dt = 0.002
step.t_end = 1
step.snapshot_stride = 10
step.form = oscillating
init.kind = gaussian
init.width = 1
sweep.omegas = 8, 16, 32, 64
)";
  throw ConfigError("--preset", "unknown preset '" + name + "' (expected ci-1d or desk-3d)");
}

namespace detail {

inline Vec3 list3(const KeyValueConfig& kv, const std::string& key, double fallback) {
  if (!kv.has(key)) return kv.get_vec3(key, {fallback, fallback, fallback});
  const auto list = kv.get_list(key, {});
  if (list.size() == 1) return {list[0], list[0], list[0]};
  if (list.empty() || list.size() > 3) throw ConfigError(key, "expected 1 to 3 values");
  Vec3 v{fallback, fallback, fallback};
  for (std::size_t i = 0; i < list.size(); ++i) v[i] = list[i];
  return v;
}

inline Envelope read_envelope(const KeyValueConfig& kv) {
  for (const char* k : {"path.e0", "path.e1", "path.nu", "path.coeffs"}) kv.touch(k);
  const auto kind = kv.get_string("path.envelope", "constant");
  if (kind == "constant") return ConstantEnvelope{kv.get_vec3("path.e0", {1.0, 0.0, 0.0})};
  if (kind == "harmonic")
    return HarmonicEnvelope{kv.get_vec3("path.e0", {1.0, 0.0, 0.0}),
                            kv.get_vec3("path.e1", {0.0, 0.0, 0.0}), kv.get_double("path.nu", 1.0)};
  if (kind == "polynomial") {
    PolynomialEnvelope p;
    for (const auto& term : KeyValueConfig::split(kv.require_string("path.coeffs"), ';')) {
      Vec3 c{0.0, 0.0, 0.0};
      const auto comps = KeyValueConfig::split(term, ',');
      if (comps.empty() || comps.size() > 3)
        throw ConfigError("path.coeffs", "each ';'-separated term needs 1 to 3 components");
      for (std::size_t i = 0; i < comps.size(); ++i)
        c[i] = KeyValueConfig::parse_double("path.coeffs", comps[i]);
      p.coeffs.push_back(c);
    }
    if (p.coeffs.empty()) throw ConfigError("path.coeffs", "needs at least one term");
    return p;
  }
  throw ConfigError("path.envelope", "expected constant, polynomial or harmonic");
}

inline Profile read_profile(const std::string& s) {
  if (s == "sin") return Profile::Sin;
  if (s == "cos") return Profile::Cos;
  if (s == "one") return Profile::One;
  if (s == "triangle") return Profile::Triangle;
  throw ConfigError("path.profile", "expected sin, cos, one or triangle");
}

inline EquationForm read_form(const std::string& s) {
  if (s == "oscillating") return EquationForm::Oscillating;
  if (s == "averaged") return EquationForm::Averaged;
  if (s == "magnetic") return EquationForm::Magnetic;
  throw ConfigError("step.form", "expected oscillating, averaged or magnetic");
}

inline std::vector<AdmissiblePair> read_pairs(const KeyValueConfig& kv, const std::string& key) {
  if (!kv.has(key)) {
    (void)kv.get_string(key, "");
    return default_pairs();
  }
  std::vector<AdmissiblePair> out;
  for (const auto& item : KeyValueConfig::split(kv.require_string(key), ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(key, "pairs are written q:r");
    out.push_back({KeyValueConfig::parse_double(key, item.substr(0, colon)),
                   KeyValueConfig::parse_double(key, item.substr(colon + 1))});
  }
  if (out.empty()) throw ConfigError(key, "empty pair list");
  return out;
}

}  // namespace detail

/// Builds and validates a RunConfig. Unknown keys are rejected.
inline RunConfig build_run_config(const KeyValueConfig& kv) {
  RunConfig rc;
  rc.source = kv;

  const auto dim = kv.get_size("grid.dim", 1);
  const Vec3 extent = detail::list3(kv, "grid.extent", 32.0);
  const Vec3 pts = detail::list3(kv, "grid.points", 256.0);
  try {
    rc.grid = GridSpec(static_cast<int>(dim), extent,
                       {static_cast<std::size_t>(pts[0]), static_cast<std::size_t>(pts[1]),
                        static_cast<std::size_t>(pts[2])});
  } catch (const ContractViolation& e) {
    throw ConfigError("grid", e.what());
  }

  auto& m = rc.model;
  m.params.c = kv.get_double("model.c", 0.0);
  m.params.C1 = kv.get_double("model.C1", 0.0);
  m.params.a = kv.get_double("model.a", 0.0);
  m.params.sigma = kv.get_double("model.sigma", 2.0 / 3.0);
  m.params.global_certified = kv.get_bool("model.global_certified", false);
  m.params.validate();

  m.path.envelope = detail::read_envelope(kv);
  m.path.profile = detail::read_profile(kv.get_string("path.profile", "sin"));
  m.path.omega = kv.get_double("path.omega", 32.0);
  if (!(m.path.omega != 0.0) || !std::isfinite(m.path.omega))
    throw ConfigError("path.omega", "must be nonzero and finite");

  m.soft.delta = kv.get_double("soft.delta", 0.2);
  m.soft.quad_points = kv.get_size("soft.quad_points", 64);
  m.soft.validate();

  const auto hmode = kv.get_string("hartree.mode", "auto");
  const double hdelta = kv.get_double("hartree.delta", 0.5);
  if (hmode == "auto")
    m.hartree = default_hartree_spec(rc.grid.dim(), hdelta);
  else if (hmode == "fourier3d")
    m.hartree = {HartreeMode::FourierMultiplier3D, hdelta};
  else if (hmode == "sampled")
    m.hartree = {HartreeMode::SampledSoftKernel, hdelta};
  else
    throw ConfigError("hartree.mode", "expected auto, fourier3d or sampled");
  if (m.hartree.mode == HartreeMode::FourierMultiplier3D && rc.grid.dim() != 3)
    throw ConfigError("hartree.mode", "fourier3d requires grid.dim = 3");

  auto& s = rc.step;
  s.dt = kv.get_double("step.dt", 1e-3);
  s.t_end = kv.get_double("step.t_end", 1.0);
  s.snapshot_stride = kv.get_size("step.snapshot_stride", 1);
  s.form = detail::read_form(kv.get_string("step.form", "oscillating"));
  s.dealias = kv.get_bool("step.dealias", false);
  s.potential_quad_nodes = kv.get_size("step.potential_quad_nodes",
                                       StepConfig::min_quad_nodes(m.path.omega, s.dt));
  s.validate(m.path);

  const auto init = kv.get_string("init.kind", "gaussian");
  for (const char* k : {"init.center", "init.width", "init.momentum", "init.file"}) kv.touch(k);
  if (init == "gaussian") {
    GaussianDatum g;
    g.center = kv.get_vec3("init.center", g.center);
    g.width = kv.get_double("init.width", 1.0);
    g.momentum = kv.get_vec3("init.momentum", g.momentum);
    if (!(g.width > 0.0)) throw ConfigError("init.width", "must be positive");
    rc.initial = g;
  } else if (init == "file") {
    rc.initial = FileDatum{kv.require_string("init.file")};
  } else {
    throw ConfigError("init.kind", "expected gaussian or file");
  }

  rc.output_dir = kv.get_string("output.dir", "out");
  rc.save_snapshots = kv.get_bool("output.snapshots", true);
  rc.seed = static_cast<unsigned long long>(kv.get_size("seed", 0));
  rc.sweep_omegas = kv.get_list("sweep.omegas", rc.sweep_omegas);
  rc.pairs = detail::read_pairs(kv, "norms.pairs");

  auto& av = rc.averaging;
  const auto zk = kv.get_string("averaging.zeta", "gaussian");
  for (const char* k : {"averaging.width", "averaging.c", "averaging.delta", "averaging.value"})
    kv.touch(k);
  if (zk == "gaussian")
    av.zeta.kind = GaussianZeta{kv.get_double("averaging.width", 1.0)};
  else if (zk == "softcoulomb")
    av.zeta.kind = SoftCoulombZeta{kv.get_double("averaging.c", 1.0),
                                   kv.get_double("averaging.delta", 0.5)};
  else if (zk == "constant")
    av.zeta.kind = ConstantZeta{kv.get_double("averaging.value", 1.0)};
  else
    throw ConfigError("averaging.zeta", "expected gaussian, softcoulomb or constant");
  av.zeta.offset = kv.get_double("averaging.offset", 0.0);
  av.zeta.tau_points = kv.get_size("averaging.tau_points", 64);
  av.horizon = kv.get_double("averaging.T", 2.0);
  if (!(av.horizon > 0.0)) throw ConfigError("averaging.T", "must be positive");
  av.omegas = kv.get_list("averaging.omegas", av.omegas);
  try {
    av.lattice.space = GridSpec::cube(3, kv.get_double("averaging.lattice_extent", 8.0),
                                      kv.get_size("averaging.lattice_points", 8));
  } catch (const ContractViolation& e) {
    throw ConfigError("averaging.lattice_points", e.what());
  }
  if (kv.has("averaging.time_intervals"))
    av.lattice.time_intervals = kv.get_size("averaging.time_intervals", 0);

  for (const auto& w : m.soft.warnings(rc.grid)) rc.warnings.push_back(w);

  if (const auto unknown = kv.unused_keys(); !unknown.empty())
    throw ConfigError(unknown.front(), "unknown configuration key");
  return rc;
}

/// Preset (if any) overlaid by the config file.
inline RunConfig load_run_config(const std::string& config_path, const std::string& preset = {}) {
  KeyValueConfig kv;
  if (!preset.empty()) {
    std::istringstream is(preset_text(preset));
    kv.merge(is, "preset:" + preset);
  }
  if (!config_path.empty()) kv.merge(KeyValueConfig::load(config_path));
  return build_run_config(kv);
}

}  // namespace xfelnls
