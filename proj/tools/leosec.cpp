#include "leosec/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit { kOk = 0, kConfigError = 1, kSolverFailure = 2, kPartialFailure = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw leosec::ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_summary(const leosec::ExperimentConfig& cfg, const leosec::SceneSet& set) {
  using namespace leosec;
  const auto& C = cfg.constellation;
  std::cout << "constellation: " << C.num_planes << " planes x " << C.sats_per_plane << " satellites, altitude "
            << C.altitude / 1e3 << " km, inclination " << rad2deg(C.inclination) << " deg\n";
  std::cout << "orbital period: " << orbital_period(C) << " s, slot interval " << set.grid.interval / set.grid.num_slots
            << " s\n";
  std::cout << "radio: " << cfg.frequency / 1e9 << " GHz, P_max " << cfg.power_dbm << " dBm, C_min "
            << cfg.solver.beam.c_min << " bit/s/Hz\n";
  std::cout << "array: N = " << cfg.array.antennas << ", region " << cfg.region_side() / cfg.wavelength()
            << " lambda, d_min " << cfg.min_spacing() / cfg.wavelength() << " lambda\n";
  std::cout << "slots with service: " << set.scenes.size() << " of " << cfg.slots << '\n';
  for (const auto& s : set.scenes)
    std::cout << "  slot " << s.slot_index << ": serving (" << s.serving.id.plane << ',' << s.serving.id.index
              << ") at " << rad2deg(s.serving.elevation) << " deg, " << s.eavesdroppers.size() << " eavesdropper(s)\n";
  if (!cfg.sweep.parameter.empty()) {
    std::cout << "sweep: " << cfg.sweep.parameter << " over " << cfg.sweep.values.size() << " value(s)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure LEO downlink beamforming with movable-antenna ground stations"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> threads;
  bool quiet = false;
  app.add_option("--seed", seed, "RNG seed (overrides [solver] seed)");
  app.add_option("--out", out_dir, "output directory (overrides [output] directory)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "suppress progress output");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run every variant on the base configuration");
  auto* sweep = app.add_subcommand("sweep", "run every variant for each sweep value");
  auto* beammap = app.add_subcommand("beammap", "run the base configuration and write beam-gain maps");
  auto* validate = app.add_subcommand("validate", "parse the configuration and report the scenario");
  for (auto* sub : {run, sweep, beammap, validate})
    sub->add_option("config", config_path, "configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  leosec::ExperimentConfig cfg;
  try {
    cfg = leosec::parse_config(read_file(config_path));
    if (seed) cfg.solver.seed = *seed;
    if (threads) cfg.solver.threads = *threads;
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    cfg.finalize();
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (validate->parsed()) {
      const auto set = leosec::build_scenes(cfg.constellation, cfg.slots, cfg.station_for_seed(), cfg.budget);
      if (!quiet) print_summary(cfg, set);
      if (set.scenes.empty()) {
        std::cerr << "config error: no slot has a satellite above the elevation mask\n";
        return kConfigError;
      }
      return kOk;
    }
    const leosec::Command cmd = sweep->parsed()     ? leosec::Command::Sweep
                                : beammap->parsed() ? leosec::Command::BeamMap
                                                    : leosec::Command::Run;
    if (cmd == leosec::Command::Sweep && cfg.sweep.parameter.empty()) {
      std::cerr << "config error: sweep requires [sweep] parameter and values\n";
      return kConfigError;
    }
    const auto outcome = leosec::run_experiment(cfg, cmd, cfg.output.directory, quiet ? nullptr : &std::cout);
    if (!quiet) std::cout << "results written to " << cfg.output.directory << '\n';
    return outcome.exit_code;
  } catch (const leosec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
}
