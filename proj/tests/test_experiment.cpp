#include "leosec/experiment.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace leosec;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
[constellation]
planes = 6
sats_per_plane = 8
[array]
antennas = 2
[grid]
slots = 3
[solver]
outer_iterations = 2
de_outer_iterations = 2
population = 6
generations = 3
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("leosec_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(CsvField, Quoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(CellSlug, DirectorySafe) {
  EXPECT_EQ(cell_slug("", "base"), "base");
  EXPECT_EQ(cell_slug("power_dbm", "35 dbm"), "power_dbm=35_dbm");
  EXPECT_EQ(cell_slug("constellation", "12x16"), "constellation=12x16");
  EXPECT_EQ(cell_slug("directory", "../x"), "directory=.._x");
}

TEST(InitialGeometry, RandomIsFeasibleAndSeeded) {
  ExperimentConfig cfg = parse_config("[array]\nantennas = 6\ninit = random\n");
  const ArrayGeometry a = initial_geometry(cfg, Variant::SCA);
  EXPECT_TRUE(a.feasible(1e-9));
  EXPECT_EQ(a.c, initial_geometry(cfg, Variant::DE).c);
  EXPECT_EQ(initial_geometry(cfg, Variant::FPA).c,
            fpa_baseline_geometry(6, cfg.wavelength(), cfg.region_side(), cfg.min_spacing()).c);
  cfg.solver.seed = 2;
  EXPECT_NE(a.c, initial_geometry(cfg, Variant::SCA).c);
}

TEST(RunExperiment, SweepWritesOneRowPerCell) {
  ExperimentConfig cfg = parse_config(std::string(kSmall) + "[sweep]\nparameter = power_dbm\nvalues = 30, 35, 40\n");
  const fs::path root = scratch("sweep");
  const ExperimentOutcome out = run_experiment(cfg, Command::Sweep, root);
  ASSERT_EQ(out.cells.size(), 9u);
  EXPECT_EQ(out.exit_code, 0);
  const auto rows = lines(slurp(root / "sweep.csv"));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0].rfind("power_dbm,variant,average_secrecy_rate,status", 0), 0u);
  EXPECT_EQ(rows[1].rfind("30,SCA,", 0), 0u);
  EXPECT_EQ(rows[9].rfind("40,FPA,", 0), 0u);
  EXPECT_EQ(lines(slurp(root / "timing.csv")).size(), 10u);
  EXPECT_NE(slurp(root / "sweep.svg").find("<svg"), std::string::npos);
  for (const auto& c : out.cells) {
    EXPECT_TRUE(fs::exists(root / c.directory / "trace.csv")) << c.directory;
    EXPECT_TRUE(fs::exists(root / c.directory / "geometry_initial.csv")) << c.directory;
    EXPECT_FALSE(std::isnan(c.average));
  }
  // FPA rate grows with transmit power.
  EXPECT_LT(out.cells[2].average, out.cells[8].average);
  fs::remove_all(root);
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
  ExperimentConfig cfg = parse_config(std::string(kSmall) + "[sweep]\nparameter = antennas\nvalues = 1, 2\n");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_experiment(cfg, Command::Sweep, a);
  cfg.solver.threads = 4;
  run_experiment(cfg, Command::Sweep, b);
  EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
  EXPECT_EQ(slurp(a / "sweep.svg"), slurp(b / "sweep.svg"));
  EXPECT_EQ(slurp(a / "cells/antennas=2/DE/geometry.csv"), slurp(b / "cells/antennas=2/DE/geometry.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(RunExperiment, PartialAndTotalFailureExitCodes) {
  ExperimentConfig cfg = parse_config(std::string(kSmall) +
                                      "[sweep]\nparameter = elevation_mask\nvalues = 10 deg, 89.99 deg\n");
  const fs::path root = scratch("fail");
  const ExperimentOutcome partial = run_experiment(cfg, Command::Sweep, root);
  EXPECT_EQ(partial.exit_code, 3);
  EXPECT_EQ(partial.cells[3].status, "error");
  EXPECT_NE(lines(slurp(root / "sweep.csv"))[4].find(",nan,error,"), std::string::npos);

  cfg.sweep.values = {"89.99 deg"};
  EXPECT_EQ(run_experiment(cfg, Command::Sweep, root).exit_code, 2);
  fs::remove_all(root);
}

TEST(RunExperiment, BeamMapsAndRunCommand) {
  ExperimentConfig cfg = parse_config(std::string(kSmall) + "[solver]\nvariants = FPA\n[output]\nbeam_map_resolution = 11\n");
  const fs::path root = scratch("beammap");
  const ExperimentOutcome out = run_experiment(cfg, Command::BeamMap, root);
  ASSERT_EQ(out.cells.size(), 1u);
  EXPECT_EQ(out.cells[0].directory, "cells/base/FPA");
  const fs::path maps = root / "cells/base/FPA/beam_maps";
  ASSERT_TRUE(fs::exists(maps));
  int files = 0;
  for (const auto& e : fs::directory_iterator(maps)) {
    ++files;
    EXPECT_EQ(lines(slurp(e.path()))[0], "direction_x,direction_y,gain");
  }
  EXPECT_EQ(files, out.cells[0].slots_used);
  EXPECT_THROW(run_experiment(cfg, Command::Sweep, root), ConfigError);
  fs::remove_all(root);
}
