#pragma once

// Alternating optimization between per-slot beamformers and antenna positions, the
// fixed-position baseline, and closed-form operation counts.

#include "leosec/beamforming.hpp"
#include "leosec/position_de.hpp"
#include "leosec/position_sca.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>

namespace leosec {

class SolverError : public Error {
public:
  using Error::Error;
};

enum class Variant { SCA, DE, FPA };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::SCA: return "SCA";
    case Variant::DE: return "DE";
    case Variant::FPA: return "FPA";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "SCA" || s == "sca") return Variant::SCA;
  if (s == "DE" || s == "de") return Variant::DE;
  if (s == "FPA" || s == "fpa") return Variant::FPA;
  throw InvalidInput("unknown variant '" + s + "'");
}

struct AoConfig {
  Variant variant = Variant::SCA;
  int outer_iterations = 30;  // I_AO for SCA, T_max for DE
  double tolerance = 1e-4;    // bit/s/Hz
  int window = 2;             // consecutive small improvements before stopping
  BeamformingConfig beam;
  ScaConfig sca;
  DeConfig de;
  bool use_relaxed_expansion = false;  // re-expand around the relaxed W instead of w w^H
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const {
    require(outer_iterations >= 0, "outer iteration cap must be >= 0");
    require(tolerance > 0.0, "convergence tolerance must be positive");
    require(window >= 1, "convergence window must be >= 1");
    require(beam.p_max > 0.0, "p_max must be positive");
    require(sca.mu > 0.0, "smoothing parameter must be positive");
    de.validate();
  }
};

struct OuterTraceRow {
  int iteration;
  double objective;         // average secrecy rate after the iteration
  int beams_accepted;       // slots whose beamformer changed
  bool position_accepted;
  double seconds;           // elapsed since start
};

struct Timings {
  double beamforming = 0.0;  // seconds
  double position = 0.0;
  double total = 0.0;
};

struct OpCounts {
  long sdp_solves = 0;
  long randomization_trials = 0;
  long position_steps = 0;   // SCA trust-region steps
  long lp_solves = 0;
  long fitness_evaluations = 0;
};

struct SdrTraceRow {
  int outer;
  int slot;  // 1-based slot index
  ScaTracePoint point;
};

struct RunResult {
  Variant variant = Variant::SCA;
  ArrayGeometry geometry;
  BeamPlan plan;
  SecrecyReport report;
  std::vector<OuterTraceRow> trace;
  std::vector<SdrTraceRow> sdr_trace;
  std::vector<ScaTraceRow> sca_trace;                   // one row per trust-region step
  std::vector<std::pair<int, DeTraceRow>> de_trace;     // (outer iteration, generation row)
  std::vector<BeamStatus> slot_status;
  bool converged = false;
  Timings timings;
  OpCounts ops;

  double objective() const { return report.average; }
};

/// rows x cols grid at lambda/2 spacing centered in the region. rows defaults to the
/// most square factorization of N.
inline ArrayGeometry fpa_baseline_geometry(int n, double wavelength, double region_side,
                                           double min_spacing, std::optional<int> rows = std::nullopt) {
  require(n >= 1, "antenna count must be >= 1");
  require(wavelength > 0.0 && region_side > 0.0, "wavelength and region side must be positive");
  int r = 0;
  if (rows) {
    require(*rows >= 1 && n % *rows == 0, "rows must divide the antenna count");
    r = *rows;
  } else {
    for (int k = static_cast<int>(std::sqrt(static_cast<double>(n))); k >= 1; --k)
      if (n % k == 0) {
        r = k;
        break;
      }
  }
  const int cols = n / r;
  const double pitch = 0.5 * wavelength;
  require(pitch >= min_spacing - 1e-12, "lambda/2 grid violates the minimum spacing");
  const double w = (cols - 1) * pitch, h = (r - 1) * pitch;
  if (w > region_side || h > region_side)
    throw InvalidInput("a " + std::to_string(r) + "x" + std::to_string(cols) +
                       " grid does not fit in the region");
  const double x0 = 0.5 * (region_side - w), y0 = 0.5 * (region_side - h);
  VecX c(2 * n);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < cols; ++j) {
      c[2 * (i * cols + j)] = x0 + j * pitch;
      c[2 * (i * cols + j) + 1] = y0 + i * pitch;
    }
  return ArrayGeometry(c, region_side, min_spacing);
}

struct ComplexityInput {
  int N = 4, P = 8, M = 1;
  int outer = 1;              // I_AO or T_max
  int beam_iterations = 1;    // I_W
  int position_iterations = 1;  // I_C
  int generations = 1;        // G_max
  int population = 4;         // N_pop
};

struct ComplexityEstimate {
  double total = 0.0;
  double beamforming = 0.0;  // outer * I_W P N^6
  double position = 0.0;     // outer * position-block term
};

inline ComplexityEstimate complexity_estimate(Variant v, const ComplexityInput& in) {
  require(in.N >= 1 && in.P >= 1 && in.M >= 1 && in.outer >= 1 && in.beam_iterations >= 1 &&
              in.position_iterations >= 1 && in.generations >= 1 && in.population >= 1,
          "complexity inputs must be positive");
  const double N = in.N, P = in.P, M = in.M;
  ComplexityEstimate e;
  e.beamforming = in.outer * in.beam_iterations * P * std::pow(N, 6);
  switch (v) {
    case Variant::SCA:
      e.position = in.outer * in.position_iterations * (N + N * (N - 1) / 2) * std::pow(2 * N, 3);
      break;
    case Variant::DE:
      e.position = in.outer * static_cast<double>(in.generations) * in.population * P * M * N;
      break;
    case Variant::FPA:
      e.position = 0.0;
      break;
  }
  e.total = e.beamforming + e.position;
  return e;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct BeamBlock {
  int accepted = 0;
  long sdp_solves = 0;
  long trials = 0;
  std::vector<std::vector<ScaTracePoint>> traces;  // per slot
};

/// Per-slot beamforming update given positions; a slot keeps its old beamformer unless the
/// new one has at least the same unclamped secrecy margin.
inline BeamBlock beamforming_block(const std::vector<SlotScene>& scenes, const ArrayGeometry& g,
                                   BeamPlan& plan, std::vector<CMat>& relaxed,
                                   std::vector<BeamStatus>& status, const AoConfig& cfg, int outer) {
  const std::size_t np = scenes.size();
  std::vector<int> accepted(np, 0), solves(np, 0), trials(np, 0);
  std::vector<std::string> failures(np);
  std::vector<std::vector<ScaTracePoint>> traces(np);
  parallel_for(np, cfg.threads, [&](std::size_t p) {
    const CMat expansion = cfg.use_relaxed_expansion && relaxed[p].size() > 0
                               ? relaxed[p]
                               : CMat(plan[p].w * plan[p].w.adjoint());
    const SlotBeamResult r = solve_beamforming_slot(scenes[p], g, cfg.beam, expansion);
    solves[p] = r.sdp_solves;
    traces[p] = r.trace;
    if (r.status == BeamStatus::SolverFailure) {
      failures[p] = "beamforming solver failed in slot " + std::to_string(scenes[p].slot_index);
      status[p] = r.status;
      return;
    }
    relaxed[p] = r.W;
    auto rng = substream(cfg.seed, 0x5eedULL, static_cast<std::uint64_t>(outer), p);
    const RankOneResult ro =
        randomize_rank_one(r.W, scenes[p], g, cfg.beam.p_max, cfg.beam.c_min, cfg.beam.randomization_trials, rng);
    trials[p] = ro.trials;
    const SlotRates old = secrecy_rate(scenes[p], g, plan[p]);
    if (ro.rates.margin >= old.margin) {
      plan[p] = ro.bf;
      accepted[p] = 1;
    }
    const double cs = secrecy_rate(scenes[p], g, plan[p]).secrecy;
    status[p] = cs >= cfg.beam.c_min ? BeamStatus::Optimal : BeamStatus::CminInfeasible;
  });
  for (const auto& f : failures)
    if (!f.empty()) throw SolverError(f);
  BeamBlock b;
  b.traces = std::move(traces);
  for (std::size_t p = 0; p < np; ++p) {
    b.accepted += accepted[p];
    b.sdp_solves += solves[p];
    b.trials += trials[p];
  }
  return b;
}

inline bool converged(const std::vector<OuterTraceRow>& trace, const AoConfig& cfg) {
  const int n = static_cast<int>(trace.size());
  if (n <= cfg.window) return false;
  for (int i = n - cfg.window; i < n; ++i)
    if (trace[i].objective - trace[i - 1].objective >= cfg.tolerance) return false;
  return true;
}

}  // namespace detail

/// Shared outer loop; the position block is chosen by cfg.variant.
inline RunResult run_ao(const std::vector<SlotScene>& scenes, const ArrayGeometry& init,
                        const AoConfig& cfg) {
  cfg.validate();
  require(!scenes.empty(), "no slot has a visible satellite");
  require(init.feasible(1e-9), "initial geometry violates box or spacing constraints");
  const auto t0 = std::chrono::steady_clock::now();

  RunResult res;
  res.variant = cfg.variant;
  res.geometry = init;
  res.plan = mrt_plan(scenes, init, cfg.beam.p_max);
  res.slot_status.assign(scenes.size(), BeamStatus::Optimal);
  std::vector<CMat> relaxed(scenes.size());
  double objective = average_secrecy_rate(scenes, res.geometry, res.plan).average;
  res.trace.push_back({0, objective, 0, false, 0.0});

  ScaConfig sca = cfg.sca;
  sca.c_min = cfg.beam.c_min;
  double trust = sca.trust_init * sca.wavelength;

  for (int r = 1; r <= cfg.outer_iterations; ++r) {
    auto tb = std::chrono::steady_clock::now();
    const auto bb = detail::beamforming_block(scenes, res.geometry, res.plan, relaxed, res.slot_status, cfg, r);
    res.ops.sdp_solves += bb.sdp_solves;
    res.ops.randomization_trials += bb.trials;
    for (std::size_t p = 0; p < scenes.size(); ++p)
      for (const auto& pt : bb.traces[p]) res.sdr_trace.push_back({r, scenes[p].slot_index, pt});
    res.timings.beamforming += detail::seconds_since(tb);
    objective = average_secrecy_rate(scenes, res.geometry, res.plan).average;

    bool moved = false;
    auto tp = std::chrono::steady_clock::now();
    if (cfg.variant == Variant::SCA) {
      ScaState state = ScaState::start(res.geometry, sca, objective);
      state.trust_radius = trust;
      for (int i = 0; i < sca.steps_per_block; ++i) {
        const ScaStepResult step = sca_position_step(scenes, state, res.plan, sca);
        ++res.ops.position_steps;
        res.sca_trace.push_back({static_cast<int>(res.sca_trace.size()) + 1, state.objective, state.trust_radius,
                                 step.accepted ? step.step_norm : 0.0,
                                 std::max(state.geometry.box_violation(), state.geometry.spacing_violation())});
        res.ops.lp_solves += step.lp_solves;
        moved |= step.accepted;
        if (step.stalled || !step.accepted) break;
      }
      trust = state.trust_radius;
      if (moved) {
        res.geometry = state.geometry;
        objective = state.objective;
      }
    } else if (cfg.variant == Variant::DE) {
      DeConfig de = cfg.de;
      de.threads = cfg.threads;
      const DeResult d = de_optimize(scenes, res.plan, de, res.geometry, cfg.beam.c_min,
                                     static_cast<std::uint64_t>(r));
      res.ops.fitness_evaluations += static_cast<long>(de.population) * (de.generations + 1);
      for (const auto& row : d.trace) res.de_trace.push_back({r, row});
      if (d.best.feasible(1e-9)) {
        const double cand = average_secrecy_rate(scenes, d.best, res.plan).average;
        if (cand >= objective) {
          moved = cand > objective || d.best.c != res.geometry.c;
          res.geometry = d.best;
          objective = cand;
        }
      }
    }
    res.timings.position += detail::seconds_since(tp);

    res.trace.push_back({r, objective, bb.accepted, moved, detail::seconds_since(t0)});
    if (detail::converged(res.trace, cfg)) {
      res.converged = true;
      break;
    }
  }

  res.report = average_secrecy_rate(scenes, res.geometry, res.plan);
  for (std::size_t p = 0; p < scenes.size(); ++p)
    if (res.slot_status[p] != BeamStatus::SolverFailure)
      res.slot_status[p] = res.report.per_slot[p].secrecy >= cfg.beam.c_min ? BeamStatus::Optimal
                                                                             : BeamStatus::CminInfeasible;
  res.timings.total = detail::seconds_since(t0);
  return res;
}

inline RunResult run_sca_ao(const std::vector<SlotScene>& scenes, const ArrayGeometry& init, AoConfig cfg) {
  cfg.variant = Variant::SCA;
  return run_ao(scenes, init, cfg);
}

inline RunResult run_de_ao(const std::vector<SlotScene>& scenes, const ArrayGeometry& init, AoConfig cfg) {
  cfg.variant = Variant::DE;
  return run_ao(scenes, init, cfg);
}

inline RunResult run_fpa(const std::vector<SlotScene>& scenes, const ArrayGeometry& init, AoConfig cfg) {
  cfg.variant = Variant::FPA;
  return run_ao(scenes, init, cfg);
}

/// Writes trace.csv, geometry.csv, plan/slot_<p>.csv and report.csv under dir.
inline void write_run_result(const std::filesystem::path& dir, const RunResult& res,
                             const std::vector<SlotScene>& scenes, double wavelength) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "plan");
  auto open = [](const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    os << std::setprecision(12);
    return os;
  };
  {
    auto os = open(dir / "trace.csv");
    os << "iteration,objective,beams_accepted,position_accepted\n";
    for (const auto& t : res.trace)
      os << t.iteration << ',' << t.objective << ',' << t.beams_accepted << ',' << (t.position_accepted ? 1 : 0) << '\n';
  }
  {
    auto os = open(dir / "geometry.csv");
    os << "n,x_m,y_m,x_lambda,y_lambda\n";
    for (int n = 0; n < res.geometry.size(); ++n) {
      const Vec2 p = res.geometry.position(n);
      os << n + 1 << ',' << p.x() << ',' << p.y() << ',' << p.x() / wavelength << ',' << p.y() / wavelength << '\n';
    }
  }
  for (std::size_t p = 0; p < res.plan.size(); ++p) {
    auto os = open(dir / "plan" / ("slot_" + std::to_string(scenes[p].slot_index) + ".csv"));
    os << "re,im\n";
    for (Eigen::Index i = 0; i < res.plan[p].w.size(); ++i)
      os << res.plan[p].w[i].real() << ',' << res.plan[p].w[i].imag() << '\n';
  }
  {
    auto os = open(dir / "sdr_trace.csv");
    os << "outer,slot,iteration,tau,feasibility_residual\n";
    for (const auto& t : res.sdr_trace)
      os << t.outer << ',' << t.slot << ',' << t.point.iteration << ',' << t.point.tau << ','
         << t.point.feasibility_residual << '\n';
  }
  if (!res.sca_trace.empty()) {
    auto os = open(dir / "sca_trace.csv");
    os << "iteration,objective,trust_radius_m,step_norm_m,max_violation_m\n";
    for (const auto& t : res.sca_trace)
      os << t.iteration << ',' << t.objective << ',' << t.trust_radius << ',' << t.step_norm << ','
         << t.max_violation << '\n';
  }
  if (!res.de_trace.empty()) {
    auto os = open(dir / "de_trace.csv");
    os << "outer,generation,best_fitness,mean_fitness,violations\n";
    for (const auto& [outer, t] : res.de_trace)
      os << outer << ',' << t.generation << ',' << t.best_fitness << ',' << t.mean_fitness << ',' << t.violations
         << '\n';
  }
  {
    auto os = open(dir / "report.csv");
    os << "slot,serving,eavesdroppers,legit_rate,max_eaves_rate,secrecy_rate,status\n";
    for (std::size_t p = 0; p < res.report.per_slot.size(); ++p) {
      const SlotRates& s = res.report.per_slot[p];
      const auto& id = scenes[p].serving.id;
      os << scenes[p].slot_index << ",\"(" << id.plane << ',' << id.index << ")\"," << scenes[p].eavesdroppers.size()
         << ',' << s.legit << ',' << s.max_eaves() << ',' << s.secrecy << ',' << to_string(res.slot_status[p]) << '\n';
    }
    os << "average,,,,," << res.report.average << ",\n";
  }
}

}  // namespace leosec
