#pragma once

// Differential evolution over antenna positions with box projection, symmetric pair
// separation and elitism.

#include "leosec/channel.hpp"
#include "leosec/parallel.hpp"

#include <numeric>
#include <random>

namespace leosec {

struct DeConfig {
  int population = 50;       // N_pop
  double scale = 0.9;        // F
  double crossover = 0.9;    // C_R
  int generations = 30;      // G_max
  int repair_cap = 2000;     // sweeps
  double penalty = 100.0;    // kappa
  bool tie_accept = true;    // replace on equal fitness
  bool single_draw = false;  // one uniform draw per trial vector instead of per dimension
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const {
    require(population >= 4, "DE population must be >= 4");
    require(scale > 0.0 && scale <= 2.0, "DE scale factor must lie in (0, 2]");
    require(crossover >= 0.0 && crossover <= 1.0, "DE crossover rate must lie in [0, 1]");
    require(generations >= 0, "DE generations must be >= 0");
    require(repair_cap >= 1, "repair cap must be >= 1");
  }
};

/// Per-coordinate bounds [l_k, u_k].
struct Box {
  VecX lower, upper;

  static Box square(int n, double side) {
    return {VecX::Zero(2 * n), VecX::Constant(2 * n, side)};
  }
  VecX clamp(const VecX& c) const { return c.cwiseMax(lower).cwiseMin(upper); }
};

/// Independent per-stream generator keyed by (seed, a, b, c).
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

/// C_bar_s minus kappa times the total C_min shortfall over slots.
inline double de_fitness(const VecX& c_flat, const std::vector<SlotScene>& scenes,
                         const BeamPlan& plan, double c_min, double kappa = 100.0) {
  const ArrayGeometry g(c_flat, 0.0, 0.0);
  const SecrecyReport rep = average_secrecy_rate(scenes, g, plan);
  double shortfall = 0.0;
  for (const auto& s : rep.per_slot) shortfall += std::max(0.0, c_min - s.secrecy);
  return rep.average - kappa * shortfall;
}

/// v = c_r1 + F (c_r2 - c_r3) with r1, r2, r3 distinct and different from i.
inline VecX mutate(const std::vector<VecX>& pop, int i, double F, std::mt19937_64& rng) {
  const int n = static_cast<int>(pop.size());
  require(n >= 4, "mutation needs at least four individuals");
  std::uniform_int_distribution<int> pick(0, n - 1);
  int r1, r2, r3;
  do r1 = pick(rng); while (r1 == i);
  do r2 = pick(rng); while (r2 == i || r2 == r1);
  do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
  return pop[r1] + F * (pop[r2] - pop[r3]);
}

/// Binomial crossover; dimension k_tilde always comes from v.
inline VecX crossover(const VecX& v, const VecX& ci, double cr, std::mt19937_64& rng,
                      bool single_draw = false) {
  require(v.size() == ci.size() && v.size() > 0, "crossover vectors must match");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> pick(0, v.size() - 1);
  const Eigen::Index forced = pick(rng);
  const double shared = single_draw ? unif(rng) : 0.0;
  VecX u = ci;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double draw = single_draw ? shared : unif(rng);
    if (draw < cr || k == forced) u[k] = v[k];
  }
  return u;
}

/// Largest t >= 0 with p + t * dir inside the box's 2-D cell for antenna n.
inline double room_along(const Box& box, int n, const Vec2& p, const Vec2& dir) {
  double t = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 2; ++a) {
    if (dir[a] > 0.0) t = std::min(t, (box.upper[2 * n + a] - p[a]) / dir[a]);
    if (dir[a] < 0.0) t = std::min(t, (box.lower[2 * n + a] - p[a]) / dir[a]);
  }
  return std::max(0.0, t);
}

/// Moves antennas n and m apart along their separating direction until they are exactly
/// d_min apart, half the correction each. With a box, an endpoint blocked by a wall hands
/// the rest of its share to the other endpoint. Coincident pairs use a random direction.
inline void separate_pair(VecX& c, int n, int m, double d_min, std::mt19937_64& rng,
                          const Box* box = nullptr) {
  Vec2 diff = c.segment<2>(2 * n) - c.segment<2>(2 * m);
  double dist = diff.norm();
  Vec2 dir;
  if (dist < 1e-12) {
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    const double a = ang(rng);
    dir = Vec2(std::cos(a), std::sin(a));
    dist = 0.0;
  } else {
    dir = diff / dist;
  }
  const double delta = d_min - dist;
  double sn = 0.5 * delta, sm = 0.5 * delta;
  if (box) {
    const double rn = room_along(*box, n, c.segment<2>(2 * n), dir);
    const double rm = room_along(*box, m, c.segment<2>(2 * m), -dir);
    if (sn > rn) {
      sm += sn - rn;
      sn = rn;
    } else if (sm > rm) {
      sn += sm - rm;
      sm = rm;
    }
  }
  c.segment<2>(2 * n) += sn * dir;
  c.segment<2>(2 * m) -= sm * dir;
}

inline double spacing_shortfall(const VecX& c, double d_min) {
  const int n = static_cast<int>(c.size() / 2);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      worst = std::max(worst, d_min - (c.segment<2>(2 * i) - c.segment<2>(2 * j)).norm());
  return worst;
}

struct RepairResult {
  VecX c;
  double violation = 0.0;  // remaining spacing shortfall, meters
  int sweeps = 0;
  bool feasible() const { return violation <= 1e-9; }
};

/// Projects onto the box, then sweeps violating pairs (closest first) until every pair is at
/// least d_min apart or the sweep cap runs out.
inline RepairResult repair(const VecX& u, const Box& box, double d_min, int cap, std::mt19937_64& rng) {
  require(u.size() == box.lower.size() && u.size() == box.upper.size(), "box size mismatch");
  require(cap >= 1, "repair cap must be >= 1");
  const int n = static_cast<int>(u.size() / 2);
  RepairResult res;
  res.c = box.clamp(u);
  const double trigger = d_min - 1e-12;
  for (int sweep = 0; sweep < cap; ++sweep) {
    std::vector<std::pair<double, std::pair<int, int>>> bad;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = (res.c.segment<2>(2 * i) - res.c.segment<2>(2 * j)).norm();
        if (d < trigger) bad.push_back({d, {i, j}});
      }
    if (bad.empty()) break;
    std::sort(bad.begin(), bad.end());
    for (const auto& [d, pr] : bad) {
      const double now = (res.c.segment<2>(2 * pr.first) - res.c.segment<2>(2 * pr.second)).norm();
      if (now < trigger) separate_pair(res.c, pr.first, pr.second, d_min, rng, &box);
    }
    res.c = box.clamp(res.c);
    res.sweeps = sweep + 1;
  }
  res.violation = std::max(0.0, spacing_shortfall(res.c, d_min));
  return res;
}

struct DeTraceRow {
  int generation;
  double best_fitness;  // elite
  double mean_fitness;
  int violations;       // individuals still violating spacing after repair
};

struct DeResult {
  ArrayGeometry best;
  double fitness = 0.0;
  double initial_fitness = 0.0;  // fitness of the warm-start geometry
  std::vector<DeTraceRow> trace;
};

/// Evolves positions with the beam plan fixed. `stream` separates runs that share a seed.
inline DeResult de_optimize(const std::vector<SlotScene>& scenes, const BeamPlan& plan,
                            const DeConfig& cfg, const ArrayGeometry& init, double c_min,
                            std::uint64_t stream = 0) {
  cfg.validate();
  require(init.feasible(1e-9), "initial geometry must be feasible");
  const int np = cfg.population;
  const int dim = static_cast<int>(init.c.size());
  const Box box = Box::square(init.size(), init.region_side);
  const double d_min = init.min_spacing;

  auto penalized = [&](const RepairResult& r) {
    return de_fitness(r.c, scenes, plan, c_min, cfg.penalty) - cfg.penalty * r.violation / d_min;
  };

  std::vector<VecX> pop(np);
  std::vector<double> fit(np);
  std::vector<double> viol(np, 0.0);
  {
    auto rng = substream(cfg.seed, stream, 0, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    pop[0] = init.c;
    for (int i = 1; i < np; ++i) {
      VecX c(dim);
      for (int k = 0; k < dim; ++k) c[k] = box.lower[k] + unif(rng) * (box.upper[k] - box.lower[k]);
      pop[i] = c;
    }
  }
  parallel_for(static_cast<std::size_t>(np), cfg.threads, [&](std::size_t i) {
    auto rng = substream(cfg.seed, stream, 1, i);
    const RepairResult r = repair(pop[i], box, d_min, cfg.repair_cap, rng);
    pop[i] = r.c;
    viol[i] = r.violation;
    fit[i] = penalized(r);
  });

  DeResult res;
  res.initial_fitness = fit[0];
  int elite_idx = static_cast<int>(std::max_element(fit.begin(), fit.end()) - fit.begin());
  VecX elite = pop[elite_idx];
  double elite_fit = fit[elite_idx];
  auto record = [&](int g) {
    const double mean = std::accumulate(fit.begin(), fit.end(), 0.0) / np;
    const int nv = static_cast<int>(std::count_if(viol.begin(), viol.end(), [](double v) { return v > 1e-9; }));
    res.trace.push_back({g, elite_fit, mean, nv});
  };
  record(0);

  for (int g = 0; g < cfg.generations; ++g) {
    std::vector<VecX> trial(np);
    std::vector<double> trial_fit(np), trial_viol(np);
    parallel_for(static_cast<std::size_t>(np), cfg.threads, [&](std::size_t i) {
      auto rng = substream(cfg.seed, stream, 2 + static_cast<std::uint64_t>(g), i);
      const VecX v = mutate(pop, static_cast<int>(i), cfg.scale, rng);
      const VecX u = crossover(v, pop[i], cfg.crossover, rng, cfg.single_draw);
      const RepairResult r = repair(u, box, d_min, cfg.repair_cap, rng);
      trial[i] = r.c;
      trial_viol[i] = r.violation;
      trial_fit[i] = penalized(r);
    });
    for (int i = 0; i < np; ++i) {
      const bool take = cfg.tie_accept ? trial_fit[i] >= fit[i] : trial_fit[i] > fit[i];
      if (take) {
        pop[i] = std::move(trial[i]);
        fit[i] = trial_fit[i];
        viol[i] = trial_viol[i];
      }
    }
    const int best = static_cast<int>(std::max_element(fit.begin(), fit.end()) - fit.begin());
    if (fit[best] > elite_fit) {
      elite = pop[best];
      elite_fit = fit[best];
    }
    pop[0] = elite;
    fit[0] = elite_fit;
    viol[0] = std::max(0.0, spacing_shortfall(elite, d_min));
    record(g + 1);
  }

  res.best = init;
  res.best.c = elite;
  res.fitness = elite_fit;
  return res;
}

}  // namespace leosec
