#pragma once

// Experiment commands behind the CLI. Each writes its artifacts into
// RunConfig::output_dir and returns the in-memory result.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "artifacts.hpp"
#include "run_config.hpp"

namespace xfelnls {

namespace fs = std::filesystem;

inline std::string snapshot_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%08zu.nlsf", step);
  return buf;
}

inline nlohmann::json pair_json(const AdmissiblePair& p) {
  nlohmann::json j;
  j["q"] = std::isinf(p.q) ? nlohmann::json("inf") : nlohmann::json(p.q);
  j["r"] = p.r;
  return j;
}

/// Run manifest: config echo plus a git-style hash of all inputs.
inline nlohmann::json make_manifest(const RunConfig& rc, const std::string& command) {
  std::string inputs = rc.source.canonical();
  if (const auto* f = std::get_if<FileDatum>(&rc.initial)) inputs += read_file_bytes(f->path);
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["input_hash"] = git_blob_hash(inputs);
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : rc.source.entries()) cfg[k] = v;
  j["config"] = cfg;
  j["warnings"] = rc.warnings;
  return j;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateResult {
  std::vector<double> times;
  std::vector<double> masses;
  double relative_mass_drift = 0.0;
};

inline SimulateResult cmd_simulate(const RunConfig& rc) {
  ensure_directory(rc.output_dir);
  if (rc.save_snapshots) ensure_directory(rc.output_dir / "snapshots");
  const Field u0 = rc.initial_field();
  SimulateResult res;
  CsvWriter csv(rc.output_dir / "trajectory.csv", {"step", "time", "mass", "l2norm"});
  integrate(u0, rc.step, rc.model, [&](std::size_t s, double t, const Field& u) {
    const double n = l2_norm(u);
    res.times.push_back(t);
    res.masses.push_back(n * n);
    csv.row({std::to_string(s), fmt17(t), fmt17(n * n), fmt17(n)});
    if (rc.save_snapshots) write_nlsf(rc.output_dir / "snapshots" / snapshot_name(s), u);
  });
  const double m0 = res.masses.front();
  for (double m : res.masses)
    res.relative_mass_drift = std::max(res.relative_mass_drift, m0 > 0 ? std::abs(m - m0) / m0 : m);
  auto manifest = make_manifest(rc, "simulate");
  manifest["form"] = to_string(rc.step.form);
  manifest["snapshots"] = res.times.size();
  manifest["relative_mass_drift"] = res.relative_mass_drift;
  write_json(rc.output_dir / "manifest.json", manifest);
  return res;
}

// ---------------------------------------------------------------------------
// sweep-omega

struct SweepResult {
  std::vector<double> omegas;
  std::vector<AdmissiblePair> pairs;
  std::vector<std::vector<double>> values;  // [omega][pair]
  std::vector<bool> diverged;
  std::vector<std::string> divergence_messages;
  std::vector<std::optional<double>> slopes;  // per pair
  double horizon = 0.0;
  int averaged_solves = 0;

  bool strictly_decreasing(std::size_t pair) const {
    for (std::size_t i = 1; i < omegas.size(); ++i)
      if (diverged[i] || diverged[i - 1] || !(values[i][pair] < values[i - 1][pair])) return false;
    return true;
  }

  /// Largest value(omega_{i+1}) / value(omega_i) over consecutive entries.
  double max_step_ratio(std::size_t pair) const {
    double m = 0.0;
    for (std::size_t i = 1; i < omegas.size(); ++i)
      m = std::max(m, values[i][pair] / values[i - 1][pair]);
    return m;
  }
};

inline void check_omegas(const std::vector<double>& omegas, const char* key, std::size_t min_count) {
  if (omegas.size() < min_count)
    throw ConfigError(key, "need at least " + std::to_string(min_count) + " omega values");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] > 0.0) || !std::isfinite(omegas[i]))
      throw ConfigError(key, "omega values must be positive");
    if (i > 0 && !(omegas[i] > omegas[i - 1]))
      throw ConfigError(key, "omega values must be strictly increasing");
  }
}

inline SweepResult cmd_sweep_omega(const RunConfig& rc, std::vector<double> omegas,
                                   unsigned workers = 1, bool write_artifacts = true) {
  check_omegas(omegas, "sweep.omegas", 3);
  for (const auto& p : rc.pairs)
    if (!is_admissible(p.q, p.r))
      throw ConfigError("norms.pairs", "(" + format_exponent(p.q) + ", " + format_exponent(p.r) +
                                           ") is not admissible");
  if (write_artifacts) ensure_directory(rc.output_dir);

  SweepResult res;
  res.omegas = omegas;
  res.pairs = rc.pairs;
  const Field u0 = rc.initial_field();

  StepConfig ref_cfg = rc.step;
  ref_cfg.form = EquationForm::Averaged;
  std::atomic<int> averaged_solves{0};
  const Trajectory reference = [&] {
    ++averaged_solves;
    return solve(u0, ref_cfg, rc.model);
  }();
  res.horizon = reference.horizon();

  std::vector<double> rs;
  for (const auto& p : rc.pairs)
    if (std::find(rs.begin(), rs.end(), p.r) == rs.end()) rs.push_back(p.r);

  const std::size_t n = omegas.size();
  res.values.assign(n, std::vector<double>(rc.pairs.size(), 0.0));
  res.diverged.assign(n, false);
  res.divergence_messages.assign(n, "");

  auto run_one = [&](std::size_t i) {
    Model model = rc.model;
    model.path.omega = omegas[i];
    StepConfig cfg = rc.step;
    cfg.form = EquationForm::Oscillating;
    cfg.potential_quad_nodes =
        std::max(cfg.potential_quad_nodes, StepConfig::min_quad_nodes(omegas[i], cfg.dt));
    std::vector<std::vector<double>> series(rs.size());
    std::size_t j = 0;
    try {
      integrate(u0, cfg, model, [&](std::size_t, double, const Field& u) {
        const Field d = u - reference.snapshots[j++];
        for (std::size_t k = 0; k < rs.size(); ++k) series[k].push_back(spatial_lr_norm(d, rs[k]));
      });
      for (std::size_t p = 0; p < rc.pairs.size(); ++p) {
        const auto k = static_cast<std::size_t>(
            std::find(rs.begin(), rs.end(), rc.pairs[p].r) - rs.begin());
        res.values[i][p] = time_lq_norm(reference.times, series[k], rc.pairs[p].q);
      }
    } catch (const DivergenceError& e) {
      res.diverged[i] = true;
      res.divergence_messages[i] = e.what();
      for (auto& v : res.values[i]) v = std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) run_one(i);
  };
  const unsigned nthreads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  res.averaged_solves = averaged_solves.load();

  for (std::size_t p = 0; p < rc.pairs.size(); ++p) {
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < n; ++i)
      if (!res.diverged[i] && res.values[i][p] > 0.0) samples.emplace_back(omegas[i], res.values[i][p]);
    if (samples.size() >= 3 && samples.size() == n)
      res.slopes.push_back(fit_rate(samples).slope);
    else
      res.slopes.push_back(std::nullopt);
  }

  if (write_artifacts) {
    CsvWriter csv(rc.output_dir / "sweep.csv", {"omega", "q", "r", "T", "value", "diverged"});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t p = 0; p < rc.pairs.size(); ++p)
        csv.row({fmt17(omegas[i]), format_exponent(rc.pairs[p].q), fmt17(rc.pairs[p].r),
                 fmt17(res.horizon), fmt17(res.values[i][p]), res.diverged[i] ? "1" : "0"});

    nlohmann::json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["omegas"] = omegas;
    summary["horizon"] = res.horizon;
    summary["averaged_solves"] = res.averaged_solves;
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t p = 0; p < rc.pairs.size(); ++p) {
      auto pj = pair_json(rc.pairs[p]);
      std::vector<nlohmann::json> vals;
      for (std::size_t i = 0; i < n; ++i)
        vals.push_back(res.diverged[i] ? nlohmann::json(nullptr) : nlohmann::json(res.values[i][p]));
      pj["values"] = vals;
      pj["slope"] = res.slopes[p] ? nlohmann::json(*res.slopes[p]) : nlohmann::json(nullptr);
      pj["strictly_decreasing"] = res.strictly_decreasing(p);
      pairs.push_back(pj);
    }
    summary["pairs"] = pairs;
    std::vector<double> diverged;
    for (std::size_t i = 0; i < n; ++i)
      if (res.diverged[i]) diverged.push_back(omegas[i]);
    summary["diverged"] = diverged;
    write_json(rc.output_dir / "sweep_summary.json", summary);

    auto manifest = make_manifest(rc, "sweep-omega");
    manifest["averaged_solves"] = res.averaged_solves;
    manifest["oscillating_solves"] = n;
    write_json(rc.output_dir / "manifest.json", manifest);
  }
  return res;
}

// ---------------------------------------------------------------------------
// verify-gauge

inline GaugeComparison cmd_verify_gauge(const RunConfig& rc, bool write_artifacts = true) {
  const Field psi0 = rc.initial_field();
  auto cmp = solve_magnetic_and_compare(psi0, rc.step, rc.model);
  if (write_artifacts) {
    ensure_directory(rc.output_dir);
    CsvWriter csv(rc.output_dir / "gauge_deviation.csv", {"step", "time", "deviation"});
    for (std::size_t j = 0; j < cmp.deviations.size(); ++j)
      csv.row({std::to_string(cmp.psi.steps[j]), fmt17(cmp.psi.times[j]), fmt17(cmp.deviations[j])});
    nlohmann::json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["max_deviation"] = cmp.max_deviation;
    summary["snapshots"] = cmp.deviations.size();
    write_json(rc.output_dir / "gauge_summary.json", summary);
    write_json(rc.output_dir / "manifest.json", make_manifest(rc, "verify-gauge"));
  }
  return cmp;
}

// ---------------------------------------------------------------------------
// verify-averaging

struct AveragingReport {
  std::vector<double> omegas;
  std::vector<double> residuals;
  std::optional<RateFitResult> fit;
  double bound_constant = 0.0;
};

inline AveragingReport cmd_verify_averaging(const RunConfig& rc, std::vector<double> omegas,
                                            bool write_artifacts = true) {
  check_omegas(omegas, "averaging.omegas", 3);
  const auto& av = rc.averaging;
  BeamPath path = rc.model.path;
  path.profile = Profile::Sin;
  AveragingReport rep;
  rep.omegas = omegas;
  rep.bound_constant = 2.0 * std::numbers::pi * (av.horizon + 2.0);
  std::vector<std::pair<double, double>> samples;
  for (double w : omegas) {
    path.omega = w;
    const double r = uniform_sup_residual(path, av.zeta, w, av.horizon, av.lattice);
    rep.residuals.push_back(r);
    samples.emplace_back(w, r);
  }
  const bool fittable =
      std::all_of(rep.residuals.begin(), rep.residuals.end(), [](double r) { return r > 0.0; });
  if (fittable) rep.fit = fit_rate(samples, rep.bound_constant);

  if (write_artifacts) {
    ensure_directory(rc.output_dir);
    CsvWriter csv(rc.output_dir / "averaging.csv", {"omega", "residual"});
    for (std::size_t i = 0; i < omegas.size(); ++i) csv.row({fmt17(omegas[i]), fmt17(rep.residuals[i])});
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["n"] = omegas.size();
    j["slope"] = rep.fit ? nlohmann::json(rep.fit->slope) : nlohmann::json(nullptr);
    j["intercept"] = rep.fit ? nlohmann::json(rep.fit->intercept) : nlohmann::json(nullptr);
    j["max_ratio"] = rep.fit ? nlohmann::json(rep.fit->max_ratio) : nlohmann::json(nullptr);
    j["bound_constant"] = rep.bound_constant;
    write_json(rc.output_dir / "averaging_fit.json", j);
    write_json(rc.output_dir / "manifest.json", make_manifest(rc, "verify-averaging"));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// norms

/// Loads a directory written by `simulate` (trajectory.csv + snapshots/).
inline Trajectory read_trajectory_dir(const fs::path& dir) {
  std::ifstream is(dir / "trajectory.csv");
  if (!is) throw IoError("cannot open " + (dir / "trajectory.csv").string());
  Trajectory traj;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = KeyValueConfig::split(line, ',');
    if (cells.size() < 2) throw IoError("malformed row in trajectory.csv: " + line);
    const auto step = static_cast<std::size_t>(std::stoull(cells[0]));
    const double t = KeyValueConfig::parse_double("trajectory.csv", cells[1]);
    Field f = read_nlsf(dir / "snapshots" / snapshot_name(step));
    if (f.space() != Space::Physical) f = inverse_transform(std::move(f));
    if (!traj.empty() && !(f.grid() == traj.snapshots.front().grid()))
      throw IoError("snapshot grids differ within " + dir.string());
    traj.record(step, t, f);
  }
  if (traj.empty()) throw IoError("no snapshots listed in " + dir.string());
  return traj;
}

/// Norms of one trajectory, or of the snapshot-wise difference of two.
inline std::vector<MixedNormReport> cmd_norms(const std::vector<fs::path>& dirs,
                                              const std::vector<AdmissiblePair>& pairs, bool raw,
                                              const std::optional<fs::path>& output_dir) {
  if (dirs.empty() || dirs.size() > 2)
    throw ConfigError("norms", "expected one trajectory directory, or two to difference");
  if (pairs.empty()) throw ConfigError("norms.pairs", "empty pair list");
  const auto mode = raw ? NormMode::Raw : NormMode::Strict;
  for (const auto& p : pairs) {
    try {
      check_pair(p, mode);
    } catch (const ContractViolation& e) {
      throw ConfigError("norms.pairs", e.what());
    }
  }
  Trajectory traj = read_trajectory_dir(dirs[0]);
  if (dirs.size() == 2) {
    const Trajectory other = read_trajectory_dir(dirs[1]);
    if (!(other.snapshots.front().grid() == traj.snapshots.front().grid()))
      throw ConfigError("norms", "trajectories are on different grids");
    traj = difference(traj, other);
  }
  std::vector<MixedNormReport> out;
  for (const auto& p : pairs) out.push_back(mixed_norm(traj, p, mode));
  if (output_dir) {
    ensure_directory(*output_dir);
    CsvWriter csv(*output_dir / "norms.csv", {"q", "r", "T", "value"});
    for (const auto& r : out)
      csv.row({format_exponent(r.pair.q), fmt17(r.pair.r), fmt17(r.horizon), fmt17(r.value)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// report

/// Human-readable digest of whatever summaries exist in `dir`.
inline std::string cmd_report(const fs::path& dir) {
  std::ostringstream os;
  bool any = false;
  if (fs::exists(dir / "manifest.json")) {
    const auto m = read_json(dir / "manifest.json");
    os << "command      : " << m.value("command", "?") << "\n";
    os << "input hash   : " << m.value("input_hash", "?") << "\n";
    if (m.contains("relative_mass_drift"))
      os << "mass drift   : " << fmt17(m["relative_mass_drift"].get<double>()) << "\n";
    any = true;
  }
  if (fs::exists(dir / "sweep_summary.json")) {
    const auto s = read_json(dir / "sweep_summary.json");
    os << "omega sweep (T=" << fmt17(s["horizon"].get<double>()) << ")\n";
    for (const auto& p : s["pairs"]) {
      os << "  (q,r)=(" << (p["q"].is_string() ? p["q"].get<std::string>() : fmt17(p["q"].get<double>()))
         << "," << fmt17(p["r"].get<double>()) << ")";
      os << " decreasing=" << (p["strictly_decreasing"].get<bool>() ? "yes" : "no");
      os << " slope=" << (p["slope"].is_null() ? std::string("n/a") : fmt17(p["slope"].get<double>()))
         << "\n";
    }
    any = true;
  }
  if (fs::exists(dir / "gauge_summary.json")) {
    const auto s = read_json(dir / "gauge_summary.json");
    os << "gauge max deviation: " << fmt17(s["max_deviation"].get<double>()) << "\n";
    any = true;
  }
  if (fs::exists(dir / "averaging_fit.json")) {
    const auto s = read_json(dir / "averaging_fit.json");
    os << "averaging slope: "
       << (s["slope"].is_null() ? std::string("n/a") : fmt17(s["slope"].get<double>())) << "\n";
    any = true;
  }
  if (!any) throw IoError("no run artifacts found in " + dir.string());
  return os.str();
}

}  // namespace xfelnls
