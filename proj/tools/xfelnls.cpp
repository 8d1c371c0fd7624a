// xfelnls: command-line front end for simulations, omega sweeps and verifications.
//
//   xfelnls simulate         --config run.conf [--preset ci-1d] [--output DIR]
//   xfelnls sweep-omega      --config run.conf [--workers N]
//   xfelnls verify-gauge     --config run.conf
//   xfelnls verify-averaging --config run.conf
//   xfelnls norms  DIR [DIR2] [--config run.conf] [--pairs "inf:2,4:3"] [--raw] [--output DIR]
//   xfelnls report DIR
//
// Exit codes: 0 success, 2 configuration error, 3 numerical divergence, 4 I/O error.

#include <CLI11.hpp>

#include <iostream>
#include <thread>

#include <xfelnls/xfelnls.hpp>

namespace {

using namespace xfelnls;

struct Options {
  std::string config;
  std::string preset;
  std::string output;
  unsigned workers = 0;
  bool raw = false;
  std::string pairs;
  std::vector<std::string> dirs;
};

RunConfig load(const Options& o) {
  RunConfig rc = load_run_config(o.config, o.preset);
  if (!o.output.empty()) rc.output_dir = o.output;
  for (const auto& w : rc.warnings) std::cerr << "warning: " << w << "\n";
  return rc;
}

void print_pairs(const std::vector<MixedNormReport>& reports) {
  for (const auto& r : reports)
    std::cout << "(" << format_exponent(r.pair.q) << ", " << fmt17(r.pair.r) << ")  T=" << fmt17(r.horizon)
              << "  " << fmt17(r.value) << "\n";
}

int run(const std::string& command, const Options& o) {
  if (command == "simulate") {
    const auto rc = load(o);
    const auto res = cmd_simulate(rc);
    std::cout << "wrote " << res.times.size() << " snapshots to " << rc.output_dir.string()
              << "\nrelative mass drift: " << fmt17(res.relative_mass_drift) << "\n";
  } else if (command == "sweep-omega") {
    const auto rc = load(o);
    const unsigned workers = o.workers ? o.workers : std::max(1u, std::thread::hardware_concurrency());
    const auto res = cmd_sweep_omega(rc, rc.sweep_omegas, workers);
    for (std::size_t i = 0; i < res.omegas.size(); ++i) {
      std::cout << "omega=" << fmt17(res.omegas[i]);
      if (res.diverged[i]) {
        std::cout << "  diverged: " << res.divergence_messages[i] << "\n";
        continue;
      }
      for (std::size_t p = 0; p < res.pairs.size(); ++p)
        std::cout << "  (" << format_exponent(res.pairs[p].q) << "," << fmt17(res.pairs[p].r)
                  << ")=" << fmt17(res.values[i][p]);
      std::cout << "\n";
    }
    const bool any_diverged = std::find(res.diverged.begin(), res.diverged.end(), true) != res.diverged.end();
    if (any_diverged) return 3;
  } else if (command == "verify-gauge") {
    const auto rc = load(o);
    const auto cmp = cmd_verify_gauge(rc);
    std::cout << "max gauge deviation: " << fmt17(cmp.max_deviation) << "\n";
  } else if (command == "verify-averaging") {
    const auto rc = load(o);
    const auto rep = cmd_verify_averaging(rc, rc.averaging.omegas);
    for (std::size_t i = 0; i < rep.omegas.size(); ++i)
      std::cout << "omega=" << fmt17(rep.omegas[i]) << "  residual=" << fmt17(rep.residuals[i]) << "\n";
    if (rep.fit)
      std::cout << "slope=" << fmt17(rep.fit->slope) << "  max_ratio=" << fmt17(rep.fit->max_ratio) << "\n";
    else
      std::cout << "slope undefined (zero residuals)\n";
  } else if (command == "norms") {
    std::vector<AdmissiblePair> pairs = default_pairs();
    if (!o.config.empty() || !o.preset.empty()) pairs = load(o).pairs;
    if (!o.pairs.empty()) {
      KeyValueConfig kv;
      kv.set("norms.pairs", o.pairs);
      pairs = detail::read_pairs(kv, "norms.pairs");
    }
    std::vector<std::filesystem::path> dirs(o.dirs.begin(), o.dirs.end());
    std::optional<std::filesystem::path> out;
    if (!o.output.empty()) out = o.output;
    print_pairs(cmd_norms(dirs, pairs, o.raw, out));
  } else if (command == "report") {
    if (o.dirs.size() != 1) throw ConfigError("report", "expected exactly one directory");
    std::cout << cmd_report(o.dirs[0]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulations and verifications for the NLS with a fast oscillating Coulomb potential"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "Key-value configuration file");
    if (config_required) c->required();
    sub->add_option("--preset", o.preset, "Preset applied before the config file")
        ->check(CLI::IsMember({"ci-1d", "desk-3d"}));
    sub->add_option("--output", o.output, "Output directory (overrides output.dir)");
  };

  for (const char* name : {"simulate", "verify-gauge", "verify-averaging"}) {
    add_common(app.add_subcommand(name, std::string("Run ") + name), true);
  }
  auto* sweep = app.add_subcommand("sweep-omega", "Sweep omega against the averaged solution");
  add_common(sweep, true);
  sweep->add_option("--workers", o.workers, "Worker threads (default: hardware concurrency)");

  auto* norms = app.add_subcommand("norms", "Mixed space-time norms of stored trajectories");
  add_common(norms, false);
  norms->add_option("dirs", o.dirs, "Trajectory directory, or two to difference")->required()->expected(1, 2);
  norms->add_option("--pairs", o.pairs, "Pairs as q:r list, e.g. \"inf:2,4:3\"");
  norms->add_flag("--raw", o.raw, "Allow non-admissible pairs");

  auto* report = app.add_subcommand("report", "Summarize artifacts in a run directory");
  report->add_option("dir", o.dirs, "Run directory")->required()->expected(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    return run(command, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedConfiguration& e) {
    std::cerr << "unsupported configuration: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  }
}
