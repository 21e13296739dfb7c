#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dsgda/game.hpp"
#include "dsgda/random_games.hpp"
#include "dsgda/solver.hpp"

namespace dsgda {

inline constexpr int kSweepSchemaVersion = 1;

/// One emitted measurement of a sweep.
struct SweepRow {
  std::string experiment;
  std::string method;
  int K = 1;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  int cell = 0;
  /// Rendered as k=v pairs joined by ';' in key order.
  std::map<std::string, double> cell_params;
  std::string metric_name;
  double metric_value = 0.0;
  bool censored = false;
};

/// Sorts rows by (experiment, cell, method, K, metric, seed) and writes them
/// with the header schema_version,experiment,method,K,gamma,seed,cell,
/// cell_params,metric_name,metric_value,censored.
void write_sweep_csv(std::ostream& os, std::vector<SweepRow> rows);
void sort_rows(std::vector<SweepRow>& rows);

/// Logarithmically spaced grid of `n` points in [10^lo, 10^hi].
std::vector<double> log_grid(double lo_exp, double hi_exp, int n);
/// Linearly spaced grid of `n` points in [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int n);

struct EpsilonResult {
  /// First round with distance <= epsilon, or the budget when censored.
  int rounds = 0;
  bool censored = false;
  double final_metric = 0.0;
};

/// Runs `cfg` with a distance stop at `epsilon` and `cfg.R` as the budget.
/// Divergence propagates as DivergenceError.
EpsilonResult rounds_to_epsilon(const TwoPlayerGame& game, RunConfig cfg, double epsilon);

struct GridEntry {
  double gamma = 0.0;
  bool diverged = false;
  /// Skipped because a smaller budget was already known to be beaten.
  bool pruned = false;
  EpsilonResult result;
};

struct GridResult {
  double gamma = 0.0;
  EpsilonResult best;
  std::vector<GridEntry> entries;
};

/// Best stepsize by rounds to epsilon: converged runs first, then fewest
/// rounds, ties to the smaller gamma; if none converge, the lowest final
/// distance wins. Divergent stepsizes are excluded; throws Error when every
/// stepsize diverges.
GridResult grid_search_gamma(const TwoPlayerGame& game, const RunConfig& base, const std::vector<double>& grid,
                             double epsilon);

/// Generic form: `evaluate(gamma, budget)` returns the outcome or throws DivergenceError.
GridResult grid_search(const std::vector<double>& grid, int budget,
                       const std::function<EpsilonResult(double, int)>& evaluate);

/// Parameters shared by every experiment; each experiment reads the fields
/// it needs (see the default_* factories).
struct SweepSpec {
  std::string experiment;
  std::vector<std::string> methods;
  std::vector<int> K_list;
  std::vector<double> gamma_grid;
  /// Per-cell family parameter: lambda_max(C), Toy GAN lambda, off-diagonal
  /// variance, coupling norm, or c of C = cI depending on the experiment.
  std::vector<double> cells;
  /// (a, b, c) scalar games for the trajectory experiment.
  std::vector<std::array<double, 3>> scalar_games;
  double epsilon = 1e-6;
  int budget = 1000;
  int trials = 1;
  std::uint64_t seed = 0;
  Index dim = 5;
  EigenRange eigen_range;
  double fixed_gamma = 0.01;
  double diag_variance = 1.0;
  double offdiag_variance = 1.0;
  double coupling_norm = 1.0;
  /// 0 means the noise sweep varies the off-diagonal variance; 1 the coupling norm.
  int noise_mode = 0;
  double init_u = 1.0;
  double init_v = -1.0;
  double blowup = 1e8;
  int threads = 1;
};

SweepSpec default_trajectory_spec();
SweepSpec default_eigen_spec();
SweepSpec default_toygan_spec();
SweepSpec default_noise_spec();
SweepSpec default_ghost_spec();
/// Factory by experiment name: trajectory, eigen, toygan, noise, ghost.
SweepSpec default_spec(const std::string& experiment);

struct TrajectoryResult {
  /// Per-round distances: metric "dist" for rounds 1..R.
  std::vector<SweepRow> rounds;
  /// Per-step iterates: metrics "u" and "v" for every local step.
  std::vector<SweepRow> steps;
};

TrajectoryResult trajectory_experiment(const SweepSpec& spec);
std::vector<SweepRow> eigen_sweep(const SweepSpec& spec);
std::vector<SweepRow> toygan_sweep(const SweepSpec& spec);
std::vector<SweepRow> noise_sweep(const SweepSpec& spec);
std::vector<SweepRow> ghost_comparison(const SweepSpec& spec);

/// Dispatches on spec.experiment (trajectory emits only per-round rows).
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Runs `task(i)` for i in [0, n) on `threads` workers; results keep index order.
template <class T>
std::vector<T> parallel_map(int n, int threads, const std::function<T(int)>& task);

}  // namespace dsgda

#include "dsgda/detail/parallel.hpp"
