#pragma once

// Key-value experiment configuration.
//
//   # comment
//   [section]
//   key = value [unit]
//
// Units: dbm, deg, rad, ghz, hz, km, m, lambda. Each key has a default unit used when the
// suffix is omitted; see README.md for the full key list.

#include "leosec/driver.hpp"

#include <charconv>
#include <map>
#include <sstream>

namespace leosec {

class ConfigError : public Error {
public:
  ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// A length given either in wavelengths or in meters.
struct ScaledLength {
  double value = 0.0;
  bool in_wavelengths = true;
  double meters(double wavelength) const { return in_wavelengths ? value * wavelength : value; }
};

struct ArrayConfig {
  enum class Init { Fpa, Random };
  int antennas = 4;
  ScaledLength region_side{3.0, true};
  ScaledLength min_spacing{0.5, true};
  Init init = Init::Fpa;
  std::optional<int> fpa_rows;
};

struct SweepConfig {
  std::string parameter;            // empty: single cell
  std::vector<std::string> values;  // raw value text, parsed like the key itself
};

struct OutputConfig {
  std::string directory = "leosec_out";
  bool timestamps = false;
  bool beam_maps = false;
  int beam_map_resolution = 101;
};

struct ExperimentConfig {
  ConstellationSpec constellation;
  double frequency = 12e9;  // Hz
  double power_dbm = 40.0;
  LinkBudget budget;
  GroundStation station;
  bool random_longitude = false;  // draw the station's initial longitude from the seed
  int slots = 8;
  ArrayConfig array;
  AoConfig solver;
  int de_outer_iterations = 100;  // T_max
  std::vector<Variant> variants{Variant::SCA, Variant::DE, Variant::FPA};
  SweepConfig sweep;
  OutputConfig output;

  ExperimentConfig() {
    solver.beam.p_max = dbm_to_watts(power_dbm);
    solver.sca.wavelength = wavelength();
    budget.wavelength = wavelength();
  }

  double wavelength() const { return kSpeedOfLight / frequency; }
  double region_side() const { return array.region_side.meters(wavelength()); }
  double min_spacing() const { return array.min_spacing.meters(wavelength()); }

  /// Station with the seeded longitude applied.
  GroundStation station_for_seed() const {
    GroundStation g = station;
    if (random_longitude) {
      auto rng = substream(solver.seed, 0x6753ULL);
      g.longitude0 = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
    }
    return g;
  }

  /// Solver settings for one variant.
  AoConfig ao_config(Variant v) const {
    AoConfig c = solver;
    c.variant = v;
    if (v == Variant::DE) c.outer_iterations = de_outer_iterations;
    c.sca.wavelength = wavelength();
    c.sca.c_min = c.beam.c_min;
    c.de.seed = solver.seed;
    c.de.threads = solver.threads;
    return c;
  }

  /// Derived quantities that depend on more than one key.
  void finalize() {
    budget.wavelength = wavelength();
    solver.sca.wavelength = wavelength();
    solver.beam.p_max = dbm_to_watts(power_dbm);
    solver.sca.c_min = solver.beam.c_min;
  }

  void validate() const {
    constellation.validate();
    require(frequency > 0.0, "frequency must be positive");
    require(slots >= 1, "slots must be >= 1");
    require(array.antennas >= 1, "antennas must be >= 1");
    require(region_side() > 0.0, "region_side must be positive");
    require(min_spacing() >= 0.0, "min_spacing must be >= 0");
    require(budget.path_loss_exponent > 0.0, "path_loss_exponent must be positive");
    require(budget.min_elevation >= 0.0 && budget.min_elevation < kPi / 2, "elevation_mask must lie in [0, 90) deg");
    require(std::abs(station.latitude) <= kPi / 2, "gs_latitude must lie in [-90, 90] deg");
    require(solver.outer_iterations >= 1 && de_outer_iterations >= 1, "outer iteration caps must be >= 1");
    require(solver.beam.c_min >= 0.0, "c_min must be >= 0");
    require(solver.beam.randomization_trials >= 0, "randomization_trials must be >= 0");
    require(solver.beam.max_sca_iterations >= 1, "sdr_iterations must be >= 1");
    require(solver.sca.trust_min > 0.0 && solver.sca.trust_min <= solver.sca.trust_init &&
                solver.sca.trust_init <= solver.sca.trust_max,
            "trust radii must satisfy 0 < trust_min <= trust_init <= trust_max");
    require(solver.sca.steps_per_block >= 1, "sca_steps must be >= 1");
    require(solver.threads >= 1, "threads must be >= 1");
    require(!variants.empty(), "at least one variant is required");
    require(output.beam_map_resolution >= 2, "beam_map_resolution must be >= 2");
    solver.validate();
    // The packing bound: N disks of radius d_min/2 must fit in the enlarged square.
    const double side = region_side() + min_spacing();
    require(array.antennas * kPi * std::pow(0.5 * min_spacing(), 2) <= side * side,
            "antennas cannot be spaced d_min apart inside the region");
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

struct Quantity {
  double number = 0.0;
  std::string unit;  // lower case, empty when omitted
};

inline Quantity parse_quantity(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(line, "missing value");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr == t.data()) throw ConfigError(line, "expected a number, got '" + t + "'");
  if (!std::isfinite(v)) throw ConfigError(line, "value must be finite");
  return {v, lower(trim(std::string_view(ptr, static_cast<std::size_t>(t.data() + t.size() - ptr))))};
}

inline int parse_int(const std::string& text, int line) {
  const Quantity q = parse_quantity(text, line);
  if (!q.unit.empty()) throw ConfigError(line, "unexpected unit '" + q.unit + "'");
  if (q.number != std::floor(q.number) || std::abs(q.number) > 1e9)
    throw ConfigError(line, "expected an integer, got '" + trim(text) + "'");
  return static_cast<int>(q.number);
}

inline double parse_plain(const std::string& text, int line) {
  const Quantity q = parse_quantity(text, line);
  if (!q.unit.empty()) throw ConfigError(line, "unexpected unit '" + q.unit + "'");
  return q.number;
}

inline bool parse_bool(const std::string& text, int line) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(line, "expected a boolean, got '" + trim(text) + "'");
}

inline double parse_angle(const std::string& text, int line) {
  const Quantity q = parse_quantity(text, line);
  if (q.unit.empty() || q.unit == "deg") return deg2rad(q.number);
  if (q.unit == "rad") return q.number;
  throw ConfigError(line, "angle unit must be deg or rad, got '" + q.unit + "'");
}

/// Lengths on the kilometer scale (altitude, radius); default unit km.
inline double parse_km_length(const std::string& text, int line) {
  const Quantity q = parse_quantity(text, line);
  if (q.unit.empty() || q.unit == "km") return q.number * 1e3;
  if (q.unit == "m") return q.number;
  throw ConfigError(line, "length unit must be km or m, got '" + q.unit + "'");
}

/// Array-scale lengths; default unit wavelengths.
inline ScaledLength parse_array_length(const std::string& text, int line) {
  const Quantity q = parse_quantity(text, line);
  if (q.unit.empty() || q.unit == "lambda") return {q.number, true};
  if (q.unit == "m") return {q.number, false};
  throw ConfigError(line, "length unit must be lambda or m, got '" + q.unit + "'");
}

inline double parse_frequency(const std::string& text, int line) {
  const Quantity q = parse_quantity(text, line);
  if (q.unit.empty() || q.unit == "hz") return q.number;
  if (q.unit == "ghz") return q.number * 1e9;
  throw ConfigError(line, "frequency unit must be ghz or hz, got '" + q.unit + "'");
}

inline double parse_dbm(const std::string& text, int line) {
  const Quantity q = parse_quantity(text, line);
  if (q.unit.empty() || q.unit == "dbm") return q.number;
  throw ConfigError(line, "power unit must be dbm, got '" + q.unit + "'");
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline const std::map<std::string, std::string>& key_sections() {
  static const std::map<std::string, std::string> table = {
      {"planes", "constellation"}, {"sats_per_plane", "constellation"}, {"altitude", "constellation"},
      {"inclination", "constellation"}, {"earth_radius", "constellation"}, {"gm", "constellation"},
      {"earth_rotation_period", "constellation"}, {"ascending_only", "constellation"},
      {"constellation", "constellation"},
      {"frequency", "radio"}, {"power_dbm", "radio"}, {"noise_dbm", "radio"}, {"eaves_noise_dbm", "radio"},
      {"c_min", "radio"}, {"path_loss_exponent", "radio"}, {"reference_gain", "radio"},
      {"serving_policy", "radio"},
      {"antennas", "array"}, {"region_side", "array"}, {"min_spacing", "array"}, {"init", "array"},
      {"fpa_rows", "array"},
      {"slots", "grid"}, {"elevation_mask", "grid"}, {"gs_latitude", "grid"}, {"gs_longitude", "grid"},
      {"variants", "solver"}, {"outer_iterations", "solver"}, {"de_outer_iterations", "solver"},
      {"tolerance", "solver"}, {"window", "solver"}, {"mu", "solver"}, {"trust_init", "solver"},
      {"trust_min", "solver"}, {"trust_max", "solver"}, {"sca_steps", "solver"}, {"max_shrinks", "solver"},
      {"slack_penalty", "solver"}, {"max_model_fallback", "solver"}, {"sdr_iterations", "solver"},
      {"sdr_tolerance", "solver"}, {"randomization_trials", "solver"}, {"multistart", "solver"}, {"population", "solver"},
      {"scale", "solver"}, {"crossover", "solver"}, {"generations", "solver"}, {"repair_cap", "solver"},
      {"de_penalty", "solver"}, {"tie_accept", "solver"}, {"single_draw", "solver"},
      {"relaxed_expansion", "solver"}, {"seed", "solver"}, {"threads", "solver"},
      {"parameter", "sweep"}, {"values", "sweep"},
      {"directory", "output"}, {"timestamps", "output"}, {"beam_maps", "output"},
      {"beam_map_resolution", "output"},
  };
  return table;
}

}  // namespace detail

/// Sets one key. Values of the sweep parameter go through here as well.
inline void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line = 0) {
  using namespace detail;
  auto& C = cfg.constellation;
  auto& S = cfg.solver;
  if (key == "planes") C.num_planes = parse_int(value, line);
  else if (key == "sats_per_plane") C.sats_per_plane = parse_int(value, line);
  else if (key == "constellation") {
    // JxK shorthand, used for constellation-size sweeps.
    const std::string v = lower(trim(value));
    const auto x = v.find('x');
    if (x == std::string::npos) throw ConfigError(line, "constellation must look like JxK, got '" + v + "'");
    C.num_planes = parse_int(v.substr(0, x), line);
    C.sats_per_plane = parse_int(v.substr(x + 1), line);
  }
  else if (key == "altitude") C.altitude = parse_km_length(value, line);
  else if (key == "inclination") C.inclination = parse_angle(value, line);
  else if (key == "earth_radius") C.earth_radius = parse_km_length(value, line);
  else if (key == "gm") C.gravitational_parameter = parse_plain(value, line);
  else if (key == "earth_rotation_period") C.earth_rotation_period = parse_plain(value, line);
  else if (key == "ascending_only") C.ascending_only = parse_bool(value, line);
  else if (key == "frequency") cfg.frequency = parse_frequency(value, line);
  else if (key == "power_dbm") cfg.power_dbm = parse_dbm(value, line);
  else if (key == "noise_dbm") cfg.budget.noise_serving = cfg.budget.noise_eaves = dbm_to_watts(parse_dbm(value, line));
  else if (key == "eaves_noise_dbm") cfg.budget.noise_eaves = dbm_to_watts(parse_dbm(value, line));
  else if (key == "c_min") S.beam.c_min = parse_plain(value, line);
  else if (key == "path_loss_exponent") cfg.budget.path_loss_exponent = parse_plain(value, line);
  else if (key == "reference_gain") {
    if (lower(trim(value)) == "free_space") cfg.budget.reference_gain.reset();
    else cfg.budget.reference_gain = parse_plain(value, line);
  }
  else if (key == "serving_policy") {
    const std::string v = lower(trim(value));
    if (v == "max_elevation") cfg.budget.policy = ServingPolicy::MaxElevation;
    else if (v == "min_range") cfg.budget.policy = ServingPolicy::MinRange;
    else throw ConfigError(line, "serving_policy must be max_elevation or min_range");
  }
  else if (key == "antennas") cfg.array.antennas = parse_int(value, line);
  else if (key == "region_side") cfg.array.region_side = parse_array_length(value, line);
  else if (key == "min_spacing") cfg.array.min_spacing = parse_array_length(value, line);
  else if (key == "init") {
    const std::string v = lower(trim(value));
    if (v == "fpa") cfg.array.init = ArrayConfig::Init::Fpa;
    else if (v == "random") cfg.array.init = ArrayConfig::Init::Random;
    else throw ConfigError(line, "init must be fpa or random");
  }
  else if (key == "fpa_rows") cfg.array.fpa_rows = parse_int(value, line);
  else if (key == "slots") cfg.slots = parse_int(value, line);
  else if (key == "elevation_mask") cfg.budget.min_elevation = parse_angle(value, line);
  else if (key == "gs_latitude") cfg.station.latitude = parse_angle(value, line);
  else if (key == "gs_longitude") {
    cfg.random_longitude = lower(trim(value)) == "random";
    if (!cfg.random_longitude) cfg.station.longitude0 = parse_angle(value, line);
  }
  else if (key == "variants") {
    cfg.variants.clear();
    for (const auto& v : split_list(value)) {
      try {
        cfg.variants.push_back(parse_variant(v));
      } catch (const InvalidInput& e) {
        throw ConfigError(line, e.what());
      }
    }
  }
  else if (key == "outer_iterations") S.outer_iterations = parse_int(value, line);
  else if (key == "de_outer_iterations") cfg.de_outer_iterations = parse_int(value, line);
  else if (key == "tolerance") S.tolerance = parse_plain(value, line);
  else if (key == "window") S.window = parse_int(value, line);
  else if (key == "mu") S.sca.mu = parse_plain(value, line);
  else if (key == "trust_init" || key == "trust_min" || key == "trust_max") {
    const ScaledLength l = parse_array_length(value, line);
    if (!l.in_wavelengths) throw ConfigError(line, key + " must be given in lambda");
    (key == "trust_init" ? S.sca.trust_init : key == "trust_min" ? S.sca.trust_min : S.sca.trust_max) = l.value;
  }
  else if (key == "sca_steps") S.sca.steps_per_block = parse_int(value, line);
  else if (key == "max_shrinks") S.sca.max_shrinks = parse_int(value, line);
  else if (key == "slack_penalty") S.sca.slack_penalty = parse_plain(value, line);
  else if (key == "max_model_fallback") S.sca.max_model_fallback = parse_bool(value, line);
  else if (key == "sdr_iterations") S.beam.max_sca_iterations = parse_int(value, line);
  else if (key == "sdr_tolerance") S.beam.sca_tol = parse_plain(value, line);
  else if (key == "randomization_trials") S.beam.randomization_trials = parse_int(value, line);
  else if (key == "multistart") S.beam.multistart = parse_bool(value, line);
  else if (key == "population") S.de.population = parse_int(value, line);
  else if (key == "scale") S.de.scale = parse_plain(value, line);
  else if (key == "crossover") S.de.crossover = parse_plain(value, line);
  else if (key == "generations") S.de.generations = parse_int(value, line);
  else if (key == "repair_cap") S.de.repair_cap = parse_int(value, line);
  else if (key == "de_penalty") S.de.penalty = parse_plain(value, line);
  else if (key == "tie_accept") S.de.tie_accept = parse_bool(value, line);
  else if (key == "single_draw") S.de.single_draw = parse_bool(value, line);
  else if (key == "relaxed_expansion") S.use_relaxed_expansion = parse_bool(value, line);
  else if (key == "seed") {
    const double v = parse_plain(value, line);
    if (v < 0 || v != std::floor(v)) throw ConfigError(line, "seed must be a non-negative integer");
    S.seed = static_cast<std::uint64_t>(v);
  }
  else if (key == "threads") S.threads = parse_int(value, line);
  else if (key == "parameter") {
    const std::string v = trim(value);
    const auto& t = key_sections();
    if (t.find(v) == t.end() || t.at(v) == "sweep" || t.at(v) == "output")
      throw ConfigError(line, "cannot sweep over '" + v + "'");
    cfg.sweep.parameter = v;
  }
  else if (key == "values") cfg.sweep.values = split_list(value);
  else if (key == "directory") cfg.output.directory = trim(value);
  else if (key == "timestamps") cfg.output.timestamps = parse_bool(value, line);
  else if (key == "beam_maps") cfg.output.beam_maps = parse_bool(value, line);
  else if (key == "beam_map_resolution") cfg.output.beam_map_resolution = parse_int(value, line);
  else throw ConfigError(line, "unknown key '" + key + "'");
}

namespace detail {

/// Range check for a single key, so errors can point at the offending line.
inline void check_key_range(const ExperimentConfig& cfg, const std::string& key, int line) {
  const auto& C = cfg.constellation;
  const auto& S = cfg.solver;
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw ConfigError(line, key + " " + what);
  };
  if (key == "planes" || key == "constellation") need(C.num_planes >= 1, "must have J >= 1");
  if (key == "sats_per_plane" || key == "constellation") need(C.sats_per_plane >= 2, "must have K >= 2");
  if (key == "altitude") need(C.altitude > 0.0, "must be positive");
  if (key == "inclination") need(C.inclination > 0.0 && C.inclination < kPi, "must lie in (0, 180) deg");
  if (key == "earth_radius") need(C.earth_radius > 0.0, "must be positive");
  if (key == "gm") need(C.gravitational_parameter > 0.0, "must be positive");
  if (key == "earth_rotation_period") need(C.earth_rotation_period > 0.0, "must be positive");
  if (key == "frequency") need(cfg.frequency > 0.0, "must be positive");
  if (key == "c_min") need(S.beam.c_min >= 0.0, "must be >= 0");
  if (key == "path_loss_exponent") need(cfg.budget.path_loss_exponent > 0.0, "must be positive");
  if (key == "reference_gain") need(!cfg.budget.reference_gain || *cfg.budget.reference_gain > 0.0, "must be positive");
  if (key == "antennas") need(cfg.array.antennas >= 1, "must be >= 1");
  if (key == "region_side") need(cfg.array.region_side.value > 0.0, "must be positive");
  if (key == "min_spacing") need(cfg.array.min_spacing.value >= 0.0, "must be >= 0");
  if (key == "fpa_rows") need(*cfg.array.fpa_rows >= 1, "must be >= 1");
  if (key == "slots") need(cfg.slots >= 1, "must be >= 1");
  if (key == "elevation_mask") need(cfg.budget.min_elevation >= 0.0 && cfg.budget.min_elevation < kPi / 2, "must lie in [0, 90) deg");
  if (key == "gs_latitude") need(std::abs(cfg.station.latitude) <= kPi / 2, "must lie in [-90, 90] deg");
  if (key == "outer_iterations") need(S.outer_iterations >= 1, "must be >= 1");
  if (key == "de_outer_iterations") need(cfg.de_outer_iterations >= 1, "must be >= 1");
  if (key == "tolerance") need(S.tolerance > 0.0, "must be positive");
  if (key == "window") need(S.window >= 1, "must be >= 1");
  if (key == "mu") need(S.sca.mu > 0.0, "must be positive");
  if (key == "trust_init") need(S.sca.trust_init > 0.0, "must be positive");
  if (key == "trust_min") need(S.sca.trust_min > 0.0, "must be positive");
  if (key == "trust_max") need(S.sca.trust_max > 0.0, "must be positive");
  if (key == "sca_steps") need(S.sca.steps_per_block >= 1, "must be >= 1");
  if (key == "max_shrinks") need(S.sca.max_shrinks >= 0, "must be >= 0");
  if (key == "slack_penalty") need(S.sca.slack_penalty > 0.0, "must be positive");
  if (key == "sdr_iterations") need(S.beam.max_sca_iterations >= 1, "must be >= 1");
  if (key == "sdr_tolerance") need(S.beam.sca_tol > 0.0, "must be positive");
  if (key == "randomization_trials") need(S.beam.randomization_trials >= 0, "must be >= 0");
  if (key == "population") need(S.de.population >= 4, "must be >= 4");
  if (key == "scale") need(S.de.scale > 0.0 && S.de.scale <= 2.0, "must lie in (0, 2]");
  if (key == "crossover") need(S.de.crossover >= 0.0 && S.de.crossover <= 1.0, "must lie in [0, 1]");
  if (key == "generations") need(S.de.generations >= 0, "must be >= 0");
  if (key == "repair_cap") need(S.de.repair_cap >= 1, "must be >= 1");
  if (key == "de_penalty") need(S.de.penalty >= 0.0, "must be >= 0");
  if (key == "threads") need(S.threads >= 1, "must be >= 1");
  if (key == "beam_map_resolution") need(cfg.output.beam_map_resolution >= 2, "must be >= 2");
  if (key == "directory") need(!cfg.output.directory.empty(), "must not be empty");
  if (key == "variants") need(!cfg.variants.empty(), "must list at least one variant");
}

}  // namespace detail

/// Parses the whole text; omitted keys keep their defaults.
inline ExperimentConfig parse_config(const std::string& text) {
  using namespace detail;
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  std::map<std::string, int> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "unterminated section header");
      section = lower(trim(s.substr(1, s.size() - 2)));
      static const char* known[] = {"constellation", "radio", "array", "grid", "solver", "sweep", "output"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw ConfigError(line, "unknown section '" + section + "'");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = lower(trim(s.substr(0, eq)));
    const std::string value = trim(s.substr(eq + 1));
    const auto& table = key_sections();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (section.empty()) throw ConfigError(line, "key '" + key + "' appears before any section");
    if (it->second != section)
      throw ConfigError(line, "key '" + key + "' belongs in [" + it->second + "], not [" + section + "]");
    if (auto prev = seen.find(key); prev != seen.end())
      throw ConfigError(line, "duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")");
    seen[key] = line;
    set_config_key(cfg, key, value, line);
    check_key_range(cfg, key, line);
  }
  if (!cfg.sweep.parameter.empty() && cfg.sweep.values.empty())
    throw ConfigError(seen.count("parameter") ? seen["parameter"] : 0, "sweep parameter given without values");
  if (cfg.sweep.parameter.empty() && !cfg.sweep.values.empty())
    throw ConfigError(seen["values"], "sweep values given without a parameter");
  cfg.finalize();
  try {
    cfg.validate();
    for (const auto& v : cfg.sweep.values) {
      ExperimentConfig probe = cfg;
      set_config_key(probe, cfg.sweep.parameter, v, seen["values"]);
      check_key_range(probe, cfg.sweep.parameter, seen["values"]);
      probe.finalize();
      probe.validate();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(0, e.what());
  }
  return cfg;
}

}  // namespace leosec
