#pragma once

// Experiment orchestration: one cell per (sweep value, variant), each with its own output
// directory, plus combined CSV tables and an SVG plot.

#include "leosec/config.hpp"

#include <ctime>
#include <mutex>

namespace leosec {

enum class Command { Run, Sweep, BeamMap };

struct CellResult {
  std::string value;  // sweep value text, "base" without a sweep
  Variant variant = Variant::SCA;
  std::string status = "ok";  // ok | cmin_infeasible | solver_failure | error
  std::string message;
  double average = std::numeric_limits<double>::quiet_NaN();
  double wall_time = 0.0;
  int outer_iterations = 0;
  int slots_used = 0;
  double initial_mean_distance = 0.0;  // wavelengths
  double final_mean_distance = 0.0;    // wavelengths
  std::string directory;               // relative to the output root

  bool failed() const { return status == "solver_failure" || status == "error"; }
};

struct ExperimentOutcome {
  std::vector<CellResult> cells;
  int exit_code = 0;  // 0 ok, 2 every cell failed, 3 some cells failed
};

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string format_number(double v, int precision = 10) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

/// Directory-safe rendering of a sweep value.
inline std::string cell_slug(const std::string& parameter, const std::string& value) {
  std::string s = parameter.empty() ? "base" : parameter + "=" + value;
  for (auto& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '=' && ch != '.' && ch != '-' && ch != '_') ch = '_';
  return s;
}

/// Initial positions: the centered lambda/2 grid, or repaired uniform draws.
inline ArrayGeometry initial_geometry(const ExperimentConfig& cfg, Variant v) {
  const double lam = cfg.wavelength();
  if (v == Variant::FPA || cfg.array.init == ArrayConfig::Init::Fpa)
    return fpa_baseline_geometry(cfg.array.antennas, lam, cfg.region_side(), cfg.min_spacing(), cfg.array.fpa_rows);
  auto rng = substream(cfg.solver.seed, 0x1417ULL);
  const int n = cfg.array.antennas;
  const Box box = Box::square(n, cfg.region_side());
  std::uniform_real_distribution<double> unif(0.0, cfg.region_side());
  VecX c(2 * n);
  for (int k = 0; k < 2 * n; ++k) c[k] = unif(rng);
  const RepairResult r = repair(c, box, cfg.min_spacing(), cfg.solver.de.repair_cap, rng);
  if (!r.feasible()) throw InvalidInput("random initial positions could not be repaired");
  return ArrayGeometry(r.c, cfg.region_side(), cfg.min_spacing());
}

inline void write_geometry_csv(const std::filesystem::path& file, const ArrayGeometry& g, double wavelength) {
  std::ofstream os(file);
  if (!os) throw Error("cannot write " + file.string());
  os << std::setprecision(12) << "n,x_m,y_m,x_lambda,y_lambda\n";
  for (int n = 0; n < g.size(); ++n) {
    const Vec2 p = g.position(n);
    os << n + 1 << ',' << p.x() << ',' << p.y() << ',' << p.x() / wavelength << ',' << p.y() / wavelength << '\n';
  }
}

/// Polyline plot of average secrecy rate against the sweep value, one series per variant.
inline void write_sweep_svg(const std::filesystem::path& file, const std::string& parameter,
                            const std::vector<std::string>& values, const std::vector<Variant>& variants,
                            const std::vector<CellResult>& cells, bool timestamp) {
  const double W = 640, H = 420, ml = 70, mr = 120, mt = 30, mb = 60;
  std::vector<double> xs;
  bool numeric = true;
  for (const auto& v : values) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) numeric = false;
    xs.push_back(x);
  }
  if (!numeric)
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  double xmin = *std::min_element(xs.begin(), xs.end()), xmax = *std::max_element(xs.begin(), xs.end());
  if (xmax == xmin) {
    xmin -= 1;
    xmax += 1;
  }
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& c : cells)
    if (!std::isnan(c.average)) {
      ymin = std::min(ymin, c.average);
      ymax = std::max(ymax, c.average);
    }
  if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
  if (ymax - ymin < 1e-9) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ofstream os(file);
  if (!os) throw Error("cannot write " + file.string());
  os << std::setprecision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H << "\">\n";
  if (timestamp) os << "<!-- generated " << std::time(nullptr) << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    os << "<text x=\"" << X(xs[i]) << "\" y=\"" << H - mb + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
       << values[i] << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = ymin + k * (ymax - ymin) / 4;
    os << "<text x=\"" << ml - 6 << "\" y=\"" << Y(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
       << format_number(y, 4) << "</text>\n";
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 15 << "\" font-size=\"13\" text-anchor=\"middle\">"
     << (parameter.empty() ? "cell" : parameter) << "</text>\n";
  os << "<text x=\"15\" y=\"" << (mt + H - mb) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
     << (mt + H - mb) / 2 << ")\">average secrecy rate (bit/s/Hz)</text>\n";
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const char* col = colors[v % 4];
    std::string pts;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const CellResult& c = cells[i * variants.size() + v];
      if (std::isnan(c.average)) continue;
      pts += format_number(X(xs[i]), 6) + "," + format_number(Y(c.average), 6) + " ";
      os << "<circle cx=\"" << X(xs[i]) << "\" cy=\"" << Y(c.average) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    os << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 20 * (v + 1) << "\" font-size=\"12\" fill=\"" << col << "\">"
       << to_string(variants[v]) << "</text>\n";
  }
  os << "</svg>\n";
}

/// Runs every cell, writes per-cell directories and the combined tables under `root`.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg, Command cmd,
                                        const std::filesystem::path& root, std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  const bool sweeping = cmd == Command::Sweep;
  if (sweeping && cfg.sweep.parameter.empty()) throw ConfigError(0, "sweep requires [sweep] parameter and values");
  const std::vector<std::string> values = sweeping ? cfg.sweep.values : std::vector<std::string>{"base"};
  const std::string parameter = sweeping ? cfg.sweep.parameter : "";
  const std::size_t nv = cfg.variants.size();
  const std::size_t ncell = values.size() * nv;
  fs::create_directories(root);

  ExperimentOutcome out;
  out.cells.resize(ncell);
  std::mutex log_mu;
  const int outer_threads = static_cast<int>(std::min<std::size_t>(ncell, static_cast<std::size_t>(cfg.solver.threads)));
  const int inner_threads = std::max(1, cfg.solver.threads / std::max(1, outer_threads));

  parallel_for(ncell, outer_threads, [&](std::size_t idx) {
    CellResult& cell = out.cells[idx];
    cell.value = values[idx / nv];
    cell.variant = cfg.variants[idx % nv];
    cell.directory = (fs::path("cells") / cell_slug(parameter, cell.value) / to_string(cell.variant)).generic_string();
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ExperimentConfig c = cfg;
      if (sweeping) {
        set_config_key(c, parameter, cell.value);
        c.finalize();
        c.validate();
      }
      c.solver.threads = inner_threads;
      const double lam = c.wavelength();
      const SceneSet set = build_scenes(c.constellation, c.slots, c.station_for_seed(), c.budget);
      if (set.scenes.empty()) throw EmptyVisibility("no slot has a satellite above the elevation mask");
      const ArrayGeometry init = initial_geometry(c, cell.variant);
      const RunResult res = run_ao(set.scenes, init, c.ao_config(cell.variant));

      const fs::path dir = root / cell.directory;
      write_run_result(dir, res, set.scenes, lam);
      write_geometry_csv(dir / "geometry_initial.csv", init, lam);
      if (cmd == Command::BeamMap || c.output.beam_maps) {
        fs::create_directories(dir / "beam_maps");
        for (std::size_t p = 0; p < set.scenes.size(); ++p) {
          std::ofstream os(dir / "beam_maps" / ("slot_" + std::to_string(set.scenes[p].slot_index) + ".csv"));
          write_beam_map_csv(os, beam_gain_map(res.geometry, res.plan[p], lam, c.output.beam_map_resolution));
        }
      }
      cell.average = res.objective();
      cell.outer_iterations = static_cast<int>(res.trace.size()) - 1;
      cell.slots_used = static_cast<int>(set.scenes.size());
      cell.initial_mean_distance = init.mean_distance_from_centroid() / lam;
      cell.final_mean_distance = res.geometry.mean_distance_from_centroid() / lam;
      const bool all_ok = std::all_of(res.slot_status.begin(), res.slot_status.end(),
                                      [](BeamStatus s) { return s == BeamStatus::Optimal; });
      cell.status = all_ok ? "ok" : "cmin_infeasible";
    } catch (const SolverError& e) {
      cell.status = "solver_failure";
      cell.message = e.what();
    } catch (const std::exception& e) {
      cell.status = "error";
      cell.message = e.what();
    }
    cell.wall_time = detail::seconds_since(t0);
    if (log) {
      std::lock_guard<std::mutex> lock(log_mu);
      *log << cell.directory << ": " << cell.status;
      if (!std::isnan(cell.average)) *log << ", average secrecy rate " << format_number(cell.average, 6);
      if (!cell.message.empty()) *log << " (" << cell.message << ")";
      *log << '\n';
    }
  });

  const std::string col = parameter.empty() ? "value" : parameter;
  {
    std::ofstream os(root / "sweep.csv");
    if (!os) throw Error("cannot write " + (root / "sweep.csv").string());
    os << csv_field(col)
       << ",variant,average_secrecy_rate,status,outer_iterations,slots,mean_distance_initial_lambda,"
          "mean_distance_final_lambda,directory\n";
    for (const auto& c : out.cells)
      os << csv_field(c.value) << ',' << to_string(c.variant) << ',' << format_number(c.average) << ','
         << c.status << ',' << c.outer_iterations << ',' << c.slots_used << ','
         << format_number(c.initial_mean_distance) << ',' << format_number(c.final_mean_distance) << ','
         << csv_field(c.directory) << '\n';
  }
  {
    std::ofstream os(root / "timing.csv");
    os << csv_field(col) << ",variant,wall_time_s,message\n";
    for (const auto& c : out.cells)
      os << csv_field(c.value) << ',' << to_string(c.variant) << ',' << format_number(c.wall_time, 6) << ','
         << csv_field(c.message) << '\n';
  }
  write_sweep_svg(root / "sweep.svg", parameter, values, cfg.variants, out.cells, cfg.output.timestamps);

  const auto failed = std::count_if(out.cells.begin(), out.cells.end(), [](const CellResult& c) { return c.failed(); });
  out.exit_code = failed == 0 ? 0 : failed == static_cast<long>(ncell) ? 2 : 3;
  return out;
}

}  // namespace leosec
