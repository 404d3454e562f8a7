#pragma once

#include <holcus/errors.hpp>
#include <holcus/estimators.hpp>
#include <holcus/parallel.hpp>
#include <holcus/qaoa.hpp>
#include <holcus/qubo.hpp>
#include <holcus/random.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

namespace holcus {

struct OptimizerConfig {
  int max_evals = 200;
  double initial_simplex_scale = 0.5;
  double convergence_tol = 1e-8; // on max - min objective over the simplex
  int restarts = 3;
  std::uint64_t seed = 0;
  int threads = 1;

  static OptimizerConfig for_layers(std::size_t p) {
    OptimizerConfig c;
    c.max_evals = 200 * static_cast<int>(std::max<std::size_t>(p, 1));
    return c;
  }
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Downhill simplex with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5, started from an explicit simplex of dim+1 vertices. Vertex 0
/// is evaluated first, so the result is never worse than f(simplex[0]).
inline NelderMeadResult nelder_mead_from_simplex(const Objective &objective,
                                                 std::vector<std::vector<double>> simplex,
                                                 const OptimizerConfig &cfg) {
  if (simplex.empty() || simplex.front().empty())
    throw DomainError("nelder_mead: empty start point");
  const std::size_t dim = simplex.front().size();
  if (simplex.size() != dim + 1)
    throw DomainError("nelder_mead: simplex needs dim + 1 vertices");
  for (const auto &v : simplex)
    if (v.size() != dim)
      throw DomainError("nelder_mead: simplex vertices differ in dimension");
  if (cfg.max_evals < 1)
    throw DomainError("nelder_mead: max_evals must be >= 1");

  NelderMeadResult res;
  auto eval = [&](const std::vector<double> &x) {
    const double f = objective(x);
    ++res.evaluations;
    if (!std::isfinite(f))
      throw OptimizationError("nelder_mead: objective returned a non-finite value", x);
    if (f < res.f) {
      res.f = f;
      res.x = x;
    }
    return f;
  };
  auto budget_left = [&] { return res.evaluations < cfg.max_evals; };

  std::vector<std::vector<double>> pts;
  std::vector<double> fs;
  for (std::size_t i = 0; i <= dim && (i == 0 || budget_left()); ++i) {
    fs.push_back(eval(simplex[i]));
    pts.push_back(std::move(simplex[i]));
  }
  if (pts.size() < dim + 1)
    return res;

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim);
  auto along = [&](double t, const std::vector<double> &towards) {
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i)
      p[i] = centroid[i] + t * (towards[i] - centroid[i]);
    return p;
  };

  while (budget_left()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front(), worst = order.back(),
                      second = order[dim - 1];
    if (fs[worst] - fs[best] < cfg.convergence_tol) {
      res.converged = true;
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t i = 0; i < dim; ++i)
        centroid[i] += pts[order[k]][i] / static_cast<double>(dim);

    auto reflected = along(-1.0, pts[worst]);
    const double fr = eval(reflected);
    if (fr < fs[best]) {
      if (!budget_left()) {
        pts[worst] = std::move(reflected);
        fs[worst] = fr;
        break;
      }
      auto expanded = along(-2.0, pts[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = std::move(expanded);
        fs[worst] = fe;
      } else {
        pts[worst] = std::move(reflected);
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      pts[worst] = std::move(reflected);
      fs[worst] = fr;
      continue;
    }
    if (!budget_left())
      break;
    // Outside contraction towards the reflected point, inside otherwise.
    const bool outside = fr < fs[worst];
    auto contracted = outside ? along(0.5, reflected) : along(0.5, pts[worst]);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : fs[worst])) {
      pts[worst] = std::move(contracted);
      fs[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= dim && budget_left(); ++k) {
      auto &p = pts[order[k]];
      for (std::size_t i = 0; i < dim; ++i)
        p[i] = pts[best][i] + 0.5 * (p[i] - pts[best][i]);
      fs[order[k]] = eval(p);
    }
  }
  return res;
}

/// Axis-aligned start: x0 and x0 + scale·e_i.
inline NelderMeadResult nelder_mead(const Objective &objective, std::vector<double> x0,
                                    const OptimizerConfig &cfg) {
  if (x0.empty())
    throw DomainError("nelder_mead: empty start point");
  std::vector<std::vector<double>> simplex{x0};
  for (std::size_t i = 0; i < x0.size(); ++i) {
    simplex.push_back(x0);
    simplex.back()[i] += cfg.initial_simplex_scale;
  }
  return nelder_mead_from_simplex(objective, std::move(simplex), cfg);
}

struct Evaluation {
  int restart = 0;
  QaoaParams params;
  double value = 0.0;
  double wall_time = 0.0; // seconds since the restart started
};

struct TrainingTrace {
  std::vector<Evaluation> evaluations; // restart-major, evaluation order
  QaoaParams best_params;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> restart_best; // best value reached by each restart
  std::uint64_t total_circuits = 0;
  std::uint64_t total_shots = 0;
  int max_qubits = 0;
};

/// Restart 0 starts at γ = β = 0; the others draw γ ∈ [0, 2π), β ∈ [0, π)
/// from the seeded stream of their index.
inline std::vector<double> initial_angles(std::size_t p, int restart, std::uint64_t seed) {
  std::vector<double> x(2 * p, 0.0);
  if (restart == 0)
    return x;
  Rng rng = make_rng(derive_seed(seed, {0x5eed, static_cast<std::uint64_t>(restart)}));
  std::uniform_real_distribution<double> g(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> b(0.0, std::numbers::pi);
  for (std::size_t i = 0; i < p; ++i)
    x[i] = g(rng);
  for (std::size_t i = 0; i < p; ++i)
    x[p + i] = b(rng);
  return x;
}

/// Start simplex of a restart. The pinned restart keeps γ = β = 0 as its
/// first vertex but jitters the others off the coordinate axes: with only γ
/// or only β nonzero the ansatz returns the offset exactly, so an
/// axis-aligned simplex there is flat and would stop at once.
inline std::vector<std::vector<double>> initial_simplex(std::size_t p, int restart,
                                                        std::uint64_t seed, double scale) {
  const auto x0 = initial_angles(p, restart, seed);
  std::vector<std::vector<double>> simplex{x0};
  Rng rng = make_rng(derive_seed(seed, {0x5eed, static_cast<std::uint64_t>(restart), 1}));
  std::uniform_real_distribution<double> jitter(-0.5 * scale, 0.5 * scale);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    auto v = x0;
    v[i] += scale;
    if (restart == 0)
      for (auto &x : v)
        x += jitter(rng);
    simplex.push_back(std::move(v));
  }
  return simplex;
}

inline TrainingTrace train_qaoa(const IsingModel &model, std::size_t p,
                                const EstimatorConfig &est_cfg,
                                const OptimizerConfig &opt_cfg) {
  if (p < 1)
    throw DomainError("train_qaoa: need at least one layer");
  if (opt_cfg.restarts < 1)
    throw DomainError("train_qaoa: restarts must be >= 1");

  struct RestartLog {
    std::vector<Evaluation> evals;
    std::uint64_t circuits = 0, shots = 0;
    int max_qubits = 0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
  };
  std::vector<RestartLog> logs(static_cast<std::size_t>(opt_cfg.restarts));

  parallel_for(logs.size(), opt_cfg.threads, [&](std::size_t r) {
    auto &log = logs[r];
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t counter = 0;
    const Objective objective = [&](std::span<const double> x) {
      auto params = QaoaParams::unflatten(x);
      EstimatorConfig cfg = est_cfg;
      cfg.seed = derive_seed(est_cfg.seed, {r, counter++});
      const auto est = estimate(build_ansatz(model, params), model, cfg);
      log.circuits += static_cast<std::uint64_t>(est.circuits_used);
      log.shots += est.shots_used;
      log.max_qubits = std::max(log.max_qubits, est.max_qubits);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      log.evals.push_back({static_cast<int>(r), std::move(params), est.value, dt.count()});
      return est.value;
    };
    auto nm = nelder_mead_from_simplex(
        objective, initial_simplex(p, static_cast<int>(r), opt_cfg.seed,
                                   opt_cfg.initial_simplex_scale),
        opt_cfg);
    log.best = nm.f;
    log.best_x = std::move(nm.x);
  });

  TrainingTrace t;
  for (auto &log : logs) {
    t.restart_best.push_back(log.best);
    if (log.best < t.best_value) {
      t.best_value = log.best;
      t.best_params = QaoaParams::unflatten(log.best_x);
    }
    t.total_circuits += log.circuits;
    t.total_shots += log.shots;
    t.max_qubits = std::max(t.max_qubits, log.max_qubits);
    std::move(log.evals.begin(), log.evals.end(), std::back_inserter(t.evaluations));
  }
  return t;
}

// CSV: restart,evaluation,value,wall_time,gamma_0..gamma_{p-1},beta_0..beta_{p-1}
inline void write_trace_csv(std::ostream &os, const TrainingTrace &t) {
  const std::size_t p = t.evaluations.empty() ? 0 : t.evaluations.front().params.layers();
  os << "restart,evaluation,value,wall_time";
  for (std::size_t i = 0; i < p; ++i)
    os << ",gamma_" << i;
  for (std::size_t i = 0; i < p; ++i)
    os << ",beta_" << i;
  os << '\n';
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  int last_restart = -1, counter = 0;
  for (const auto &e : t.evaluations) {
    if (e.restart != last_restart) {
      last_restart = e.restart;
      counter = 0;
    }
    os << e.restart << ',' << counter++ << ',' << num(e.value) << ',' << num(e.wall_time);
    for (double g : e.params.gammas)
      os << ',' << num(g);
    for (double b : e.params.betas)
      os << ',' << num(b);
    os << '\n';
  }
}

} // namespace holcus
