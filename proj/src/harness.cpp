#include "dsgda/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "dsgda/csv.hpp"
#include "dsgda/federated.hpp"
#include "dsgda/spectra.hpp"

namespace dsgda {

void sort_rows(std::vector<SweepRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.experiment, a.cell, a.method, a.K, a.metric_name, a.seed) <
           std::tie(b.experiment, b.cell, b.method, b.K, b.metric_name, b.seed);
  });
}

void write_sweep_csv(std::ostream& os, std::vector<SweepRow> rows) {
  sort_rows(rows);
  CsvWriter w(os);
  w.row({"schema_version", "experiment", "method", "K", "gamma", "seed", "cell", "cell_params", "metric_name",
         "metric_value", "censored"});
  for (const auto& r : rows) {
    std::string params;
    for (const auto& [k, v] : r.cell_params) {
      if (!params.empty()) params += ';';
      params += k + "=" + format_double(v);
    }
    w.row({std::to_string(kSweepSchemaVersion), r.experiment, r.method, std::to_string(r.K), format_double(r.gamma),
           std::to_string(r.seed), std::to_string(r.cell), params, r.metric_name, format_double(r.metric_value),
           r.censored ? "1" : "0"});
  }
}

std::vector<double> log_grid(double lo_exp, double hi_exp, int n) {
  if (n < 1) throw InvalidArgument("log_grid: need at least one point");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) {
    const double e = n == 1 ? lo_exp : lo_exp + (hi_exp - lo_exp) * i / (n - 1);
    g.push_back(std::pow(10.0, e));
  }
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 1) throw InvalidArgument("linear_grid: need at least one point");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return g;
}

EpsilonResult rounds_to_epsilon(const TwoPlayerGame& game, RunConfig cfg, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("rounds_to_epsilon: epsilon must be positive");
  cfg.stop = StopRule{StopMetric::Distance, epsilon};
  const RunTrace trace = run(game, cfg);
  EpsilonResult out;
  out.censored = trace.status != RunStatus::Converged;
  out.rounds = out.censored ? cfg.R : trace.executed_rounds();
  out.final_metric = std::sqrt(*trace.last().dist_sq);
  return out;
}

GridResult grid_search(const std::vector<double>& grid, int budget,
                       const std::function<EpsilonResult(double, int)>& evaluate) {
  if (grid.empty()) throw InvalidArgument("grid_search: empty stepsize grid");
  if (budget < 1) throw InvalidArgument("grid_search: budget must be >= 1");
  std::vector<double> order = grid;
  for (double g : order) {
    if (!(g > 0.0)) throw InvalidArgument("grid_search: stepsizes must be positive");
  }
  std::sort(order.begin(), order.end(), std::greater<>());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  GridResult res;
  std::optional<std::size_t> best;
  for (double g : order) {
    GridEntry e;
    e.gamma = g;
    const bool have_converged = best && !res.entries[*best].result.censored;
    const int b = have_converged ? res.entries[*best].result.rounds : budget;
    try {
      e.result = evaluate(g, b);
    } catch (const DivergenceError&) {
      e.diverged = true;
    }
    res.entries.push_back(e);
    const std::size_t idx = res.entries.size() - 1;
    if (e.diverged) continue;
    if (!e.result.censored) {
      // Descending order: equal rounds at a smaller gamma replace the incumbent.
      if (!have_converged || e.result.rounds <= res.entries[*best].result.rounds) best = idx;
    } else if (have_converged) {
      res.entries[idx].pruned = b < budget;
    } else if (!best || e.result.final_metric <= res.entries[*best].result.final_metric) {
      best = idx;
    }
  }
  if (!best) throw Error("grid_search: every stepsize in the grid diverged");
  res.gamma = res.entries[*best].gamma;
  res.best = res.entries[*best].result;
  std::reverse(res.entries.begin(), res.entries.end());
  return res;
}

GridResult grid_search_gamma(const TwoPlayerGame& game, const RunConfig& base, const std::vector<double>& grid,
                             double epsilon) {
  return grid_search(grid, base.R, [&](double g, int budget) {
    RunConfig cfg = base;
    cfg.gamma = g;
    cfg.R = budget;
    return rounds_to_epsilon(game, cfg, epsilon);
  });
}

SweepSpec default_trajectory_spec() {
  SweepSpec s;
  s.experiment = "trajectory";
  s.methods = {"decoupled"};
  s.K_list = {1, 2, 5};
  s.scalar_games = {{1, 10, 10}, {1, 10, 3.5}, {1, 10, 2.7}, {1, 10, 0}};
  s.gamma_grid = log_grid(-4, -1, 31);
  s.epsilon = 1e-6;
  s.budget = 31;
  s.dim = 1;
  return s;
}

SweepSpec default_eigen_spec() {
  SweepSpec s;
  s.experiment = "eigen";
  s.methods = {"gda", "decoupled", "eg", "ogda", "alt_gda"};
  s.K_list = {1, 2, 5, 10, 50};
  s.cells = log_grid(-1.5, 1.5, 20);
  s.gamma_grid = log_grid(-4, 0, 41);
  s.epsilon = 1e-6;
  s.budget = 20000;
  s.dim = 5;
  return s;
}

SweepSpec default_toygan_spec() {
  SweepSpec s;
  s.experiment = "toygan";
  s.methods = {"decoupled"};
  s.K_list = {1, 2, 3, 4, 5};
  s.cells = log_grid(-4.5, 3, 16);
  s.gamma_grid = log_grid(-7, 0, 29);
  s.budget = 100;
  s.trials = 5;
  s.dim = 2;
  return s;
}

SweepSpec default_noise_spec() {
  SweepSpec s;
  s.experiment = "noise";
  s.methods = {"decoupled", "local_sgda"};
  s.K_list = {40};
  s.cells = linear_grid(1, 10, 10);
  s.budget = 100;
  s.trials = 5;
  s.fixed_gamma = 0.01;
  s.diag_variance = 1.0;
  s.offdiag_variance = 1.0;
  s.coupling_norm = 1.0;
  s.dim = 5;
  return s;
}

SweepSpec default_ghost_spec() {
  SweepSpec s;
  s.experiment = "ghost";
  s.methods = {"decoupled", "ghost"};
  s.K_list = {1, 5};
  s.cells = {25, 15, 5};
  s.scalar_games = {{1, 10, 0}};
  s.gamma_grid = log_grid(-4, 0, 60);
  s.epsilon = 1e-6;
  s.budget = 20000;
  s.dim = 1;
  return s;
}

SweepSpec default_spec(const std::string& experiment) {
  if (experiment == "trajectory") return default_trajectory_spec();
  if (experiment == "eigen") return default_eigen_spec();
  if (experiment == "toygan") return default_toygan_spec();
  if (experiment == "noise") return default_noise_spec();
  if (experiment == "ghost") return default_ghost_spec();
  throw InvalidArgument("unknown experiment '" + experiment + "'");
}

namespace {

void validate_spec(const SweepSpec& s) {
  if (s.trials < 1) throw InvalidArgument("sweep: trials must be >= 1");
  if (s.budget < 1) throw InvalidArgument("sweep: round budget must be >= 1");
  for (double g : s.gamma_grid) {
    if (!(g > 0.0)) throw InvalidArgument("sweep: gamma grid must be strictly positive");
  }
  for (int K : s.K_list) {
    if (K < 1) throw InvalidArgument("sweep: K values must be >= 1");
  }
}

JointPoint constant_point(Index du, Index dv, double u, double v) {
  return JointPoint::two_player(Vector::Constant(du, u), Vector::Constant(dv, v));
}

/// (method, K) pairs: local methods take every K, baselines run once with K = 1.
std::vector<std::pair<Method, int>> expand_methods(const SweepSpec& s) {
  std::vector<std::pair<Method, int>> out;
  for (const auto& name : s.methods) {
    const Method m = parse_method(name);
    if (is_local_method(m)) {
      for (int K : s.K_list) out.emplace_back(m, K);
    } else {
      out.emplace_back(m, 1);
    }
  }
  return out;
}

SweepRow base_row(const SweepSpec& s, const std::string& method, int K, int cell) {
  SweepRow r;
  r.experiment = s.experiment;
  r.method = method;
  r.K = K;
  r.seed = s.seed;
  r.cell = cell;
  return r;
}

/// Grid search whose outcome is a rounds-to-epsilon row (censored at the
/// budget, NaN gamma when every stepsize diverges).
SweepRow rounds_row(const SweepSpec& s, const TwoPlayerGame& game, const RunConfig& base, const std::string& method,
                    int K, int cell, const std::map<std::string, double>& params) {
  SweepRow row = base_row(s, method, K, cell);
  row.cell_params = params;
  row.metric_name = "rounds_to_eps";
  try {
    const GridResult g = grid_search_gamma(game, base, s.gamma_grid, s.epsilon);
    row.gamma = g.gamma;
    row.metric_value = g.best.rounds;
    row.censored = g.best.censored;
  } catch (const DivergenceError&) {
    throw;
  } catch (const Error&) {
    row.gamma = std::numeric_limits<double>::quiet_NaN();
    row.metric_value = s.budget;
    row.censored = true;
    row.cell_params["all_diverged"] = 1;
  }
  return row;
}

}  // namespace

TrajectoryResult trajectory_experiment(const SweepSpec& spec) {
  validate_spec(spec);
  const auto pairs = expand_methods(spec);
  const int n = static_cast<int>(spec.scalar_games.size());
  auto cells = parallel_map<TrajectoryResult>(n, spec.threads, [&](int i) {
    const auto& [a, b, c] = spec.scalar_games[i];
    const Index d = spec.dim;
    const QuadraticGame game(a * Matrix::Identity(d, d), b * Matrix::Identity(d, d), c * Matrix::Identity(d, d));
    const std::map<std::string, double> params{{"a", a}, {"b", b}, {"c", c}};
    TrajectoryResult out;
    for (const auto& [m, K] : pairs) {
      RunConfig cfg;
      cfg.method = m;
      cfg.K = K;
      cfg.R = spec.budget;
      cfg.init = constant_point(d, d, spec.init_u, spec.init_v);
      cfg.seed = spec.seed;
      cfg.blowup = spec.blowup;
      const GridResult g = grid_search_gamma(game, cfg, spec.gamma_grid, spec.epsilon);
      cfg.gamma = g.gamma;
      cfg.record_steps = true;
      RunTrace trace;
      try {
        trace = run(game, cfg);
      } catch (const DivergenceError& e) {
        trace = e.partial_trace();
      }
      for (const auto& r : trace.rounds) {
        if (r.round == 0) continue;
        SweepRow row = base_row(spec, method_name(m), K, i);
        row.gamma = g.gamma;
        row.cell_params = params;
        row.cell_params["round"] = r.round;
        row.metric_name = "dist";
        row.metric_value = std::sqrt(*r.dist_sq);
        out.rounds.push_back(row);
      }
      for (const auto& st : trace.steps) {
        for (int blk = 0; blk < 2; ++blk) {
          SweepRow row = base_row(spec, method_name(m), K, i);
          row.gamma = g.gamma;
          row.cell_params = params;
          row.cell_params["round"] = st.round;
          row.cell_params["step"] = st.step;
          row.metric_name = blk == 0 ? "u" : "v";
          row.metric_value = st.point.block(blk)(0);
          out.steps.push_back(row);
        }
      }
    }
    return out;
  });
  TrajectoryResult all;
  for (auto& c : cells) {
    all.rounds.insert(all.rounds.end(), c.rounds.begin(), c.rounds.end());
    all.steps.insert(all.steps.end(), c.steps.begin(), c.steps.end());
  }
  sort_rows(all.rounds);
  sort_rows(all.steps);
  return all;
}

std::vector<SweepRow> eigen_sweep(const SweepSpec& spec) {
  validate_spec(spec);
  const auto pairs = expand_methods(spec);
  const int n = static_cast<int>(spec.cells.size());
  auto cells = parallel_map<std::vector<SweepRow>>(n, spec.threads, [&](int i) {
    RngStream rng(spec.seed, static_cast<std::uint64_t>(i));
    const QuadraticGame game = random_quadratic(spec.dim, spec.dim, spec.cells[i], spec.eigen_range, rng);
    const SpectralConstants sc = analyze(game);
    const std::map<std::string, double> params{{"lambda_max_C", spec.cells[i]}, {"kappa_c", sc.kappa_c}};
    std::vector<SweepRow> rows;
    for (const auto& [m, K] : pairs) {
      RunConfig cfg;
      cfg.method = m;
      cfg.K = K;
      cfg.R = spec.budget;
      cfg.init = constant_point(spec.dim, spec.dim, spec.init_u, spec.init_v);
      cfg.seed = spec.seed;
      cfg.blowup = spec.blowup;
      rows.push_back(rounds_row(spec, game, cfg, method_name(m), K, i, params));
    }
    return rows;
  });
  std::vector<SweepRow> all;
  for (auto& c : cells) all.insert(all.end(), c.begin(), c.end());
  sort_rows(all);
  return all;
}

std::vector<SweepRow> toygan_sweep(const SweepSpec& spec) {
  validate_spec(spec);
  RngStream sigma_rng(spec.seed, 0xC0FFEEULL);
  const Matrix sigma = random_spd(spec.dim, spec.eigen_range, sigma_rng);
  std::vector<JointPoint> inits;
  for (int t = 0; t < spec.trials; ++t) {
    RngStream rng(spec.seed, 0x10000ULL + static_cast<std::uint64_t>(t));
    inits.push_back(random_point({spec.dim, spec.dim * spec.dim}, 1.0, rng));
  }
  const auto pairs = expand_methods(spec);
  const int n = static_cast<int>(spec.cells.size());
  auto cells = parallel_map<std::vector<SweepRow>>(n, spec.threads, [&](int i) {
    const double lambda = spec.cells[i];
    const ToyGanGame game(sigma, 1.0 / lambda, 1.0 / lambda);
    std::vector<SweepRow> rows;
    for (const auto& [m, K] : pairs) {
      double best_gamma = std::numeric_limits<double>::quiet_NaN();
      double best_value = std::numeric_limits<double>::infinity();
      for (double g : spec.gamma_grid) {
        double total = 0.0;
        bool diverged = false;
        for (int t = 0; t < spec.trials && !diverged; ++t) {
          RunConfig cfg;
          cfg.method = m;
          cfg.K = K;
          cfg.R = spec.budget;
          cfg.gamma = g;
          cfg.init = inits[t];
          cfg.seed = spec.seed;
          cfg.blowup = spec.blowup;
          try {
            total += run(game, cfg).min_grad_norm();
          } catch (const DivergenceError&) {
            diverged = true;
          }
        }
        if (diverged) continue;
        const double mean = total / spec.trials;
        if (mean < best_value || (mean == best_value && g < best_gamma)) {
          best_value = mean;
          best_gamma = g;
        }
      }
      SweepRow row = base_row(spec, method_name(m), K, i);
      row.gamma = best_gamma;
      row.cell_params = {{"lambda", lambda}, {"inv_lambda", 1.0 / lambda}};
      row.metric_name = "min_grad_norm";
      row.metric_value = best_value;
      row.censored = !std::isfinite(best_value);
      rows.push_back(row);
    }
    return rows;
  });
  std::vector<SweepRow> all;
  for (auto& c : cells) all.insert(all.end(), c.begin(), c.end());
  sort_rows(all);
  return all;
}

std::vector<SweepRow> noise_sweep(const SweepSpec& spec) {
  validate_spec(spec);
  if (spec.K_list.empty()) throw InvalidArgument("noise_sweep: K list is empty");
  const int K = spec.K_list.front();
  const int n = static_cast<int>(spec.cells.size());
  auto cells = parallel_map<std::vector<SweepRow>>(n, spec.threads, [&](int i) {
    const double coupling = spec.noise_mode == 1 ? spec.cells[i] : spec.coupling_norm;
    const double offdiag = spec.noise_mode == 1 ? spec.offdiag_variance : spec.cells[i];
    RngStream rng(spec.seed, spec.noise_mode == 1 ? static_cast<std::uint64_t>(i) : 0);
    const QuadraticGame game = random_quadratic(spec.dim, spec.dim, coupling, spec.eigen_range, rng);
    NoiseLevels lv;
    lv.uu = lv.vv = std::sqrt(spec.diag_variance);
    lv.uv = lv.vu = std::sqrt(offdiag);
    std::map<std::string, double> params{{"coupling_norm", coupling},
                                         {"diag_variance", spec.diag_variance},
                                         {"offdiag_variance", offdiag}};
    std::vector<SweepRow> rows;
    for (const auto& name : spec.methods) {
      double total = 0.0;
      bool diverged = false;
      for (int t = 0; t < spec.trials; ++t) {
        RunConfig cfg;
        cfg.gamma = spec.fixed_gamma;
        cfg.K = K;
        cfg.R = spec.budget;
        cfg.init = constant_point(spec.dim, spec.dim, spec.init_u, spec.init_v);
        cfg.seed = spec.seed;
        cfg.noise = NoiseModel(lv, spec.seed, static_cast<std::uint64_t>(t));
        cfg.blowup = spec.blowup;
        try {
          if (name == "local_sgda") {
            total += two_oracle_local_sgda(game, cfg).min_grad_norm();
          } else {
            cfg.method = parse_method(name);
            cfg.noise_source = NoiseSource::OwnerOracles;
            total += run(game, cfg).min_grad_norm();
          }
        } catch (const DivergenceError&) {
          diverged = true;
          break;
        }
      }
      SweepRow row = base_row(spec, name, K, i);
      row.gamma = spec.fixed_gamma;
      row.cell_params = params;
      row.metric_name = "min_grad_norm";
      row.metric_value = diverged ? std::numeric_limits<double>::infinity() : total / spec.trials;
      row.censored = diverged;
      rows.push_back(row);
    }
    return rows;
  });
  std::vector<SweepRow> all;
  for (auto& c : cells) all.insert(all.end(), c.begin(), c.end());
  sort_rows(all);
  return all;
}

std::vector<SweepRow> ghost_comparison(const SweepSpec& spec) {
  validate_spec(spec);
  if (spec.scalar_games.empty()) throw InvalidArgument("ghost_comparison: needs (a, b) in scalar_games");
  const double a = spec.scalar_games.front()[0], b = spec.scalar_games.front()[1];
  const int n = static_cast<int>(spec.cells.size());
  auto cells = parallel_map<std::vector<SweepRow>>(n, spec.threads, [&](int i) {
    const Index d = spec.dim;
    const double c = spec.cells[i];
    const QuadraticGame game(a * Matrix::Identity(d, d), b * Matrix::Identity(d, d), c * Matrix::Identity(d, d));
    const std::map<std::string, double> params{{"a", a}, {"b", b}, {"c", c}};
    std::vector<SweepRow> rows;
    for (int K : spec.K_list) {
      RunConfig cfg;
      cfg.method = Method::Decoupled;
      cfg.K = K;
      cfg.R = spec.budget;
      cfg.init = constant_point(d, d, spec.init_u, spec.init_v);
      cfg.seed = spec.seed;
      cfg.blowup = spec.blowup;
      SweepRow plain = rounds_row(spec, game, cfg, "decoupled", K, i, params);
      rows.push_back(plain);
      if (!std::isfinite(plain.gamma)) continue;
      cfg.method = Method::Ghost;
      cfg.gamma = plain.gamma;
      SweepRow ghost = base_row(spec, "ghost", K, i);
      ghost.gamma = plain.gamma;
      ghost.cell_params = params;
      ghost.metric_name = "rounds_to_eps";
      try {
        const EpsilonResult r = rounds_to_epsilon(game, cfg, spec.epsilon);
        ghost.metric_value = r.rounds;
        ghost.censored = r.censored;
      } catch (const DivergenceError&) {
        ghost.metric_value = spec.budget;
        ghost.censored = true;
        ghost.cell_params["diverged"] = 1;
      }
      rows.push_back(ghost);
    }
    return rows;
  });
  std::vector<SweepRow> all;
  for (auto& c : cells) all.insert(all.end(), c.begin(), c.end());
  sort_rows(all);
  return all;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.experiment == "trajectory") return trajectory_experiment(spec).rounds;
  if (spec.experiment == "eigen") return eigen_sweep(spec);
  if (spec.experiment == "toygan") return toygan_sweep(spec);
  if (spec.experiment == "noise") return noise_sweep(spec);
  if (spec.experiment == "ghost") return ghost_comparison(spec);
  throw InvalidArgument("unknown experiment '" + spec.experiment + "'");
}

}  // namespace dsgda
