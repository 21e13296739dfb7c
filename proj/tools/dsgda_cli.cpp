#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dsgda/closed_form.hpp"
#include "dsgda/csv.hpp"
#include "dsgda/federated.hpp"
#include "dsgda/harness.hpp"
#include "dsgda/io.hpp"
#include "dsgda/nplayer.hpp"
#include "dsgda/random_games.hpp"
#include "dsgda/solver.hpp"
#include "dsgda/spectra.hpp"

using namespace dsgda;

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> players;
  std::optional<std::string> method;
  std::optional<double> gamma;
  std::optional<int> K;
  std::optional<int> R;
  std::optional<double> epsilon;
  std::optional<int> threads;
  std::string format = "csv";
  std::string experiment;
  int max_dim = 8;
  int max_K = 20;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidArgument("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::shared_ptr<TwoPlayerGame> game_of(const json& cfg) {
  if (!cfg.contains("game")) throw InvalidArgument("config needs a 'game' object");
  return game_from_json(cfg.at("game"));
}

const QuadraticGame& quadratic_of(const std::shared_ptr<TwoPlayerGame>& g) {
  const auto* q = dynamic_cast<const QuadraticGame*>(g.get());
  if (!q) throw Unsupported("this command needs a quadratic game");
  return *q;
}

StopRule stop_of(const json& j) {
  StopRule s;
  const std::string metric = j.value("metric", "distance");
  if (metric == "distance") {
    s.metric = StopMetric::Distance;
  } else if (metric == "grad_norm") {
    s.metric = StopMetric::GradNorm;
  } else {
    throw InvalidArgument("stop.metric must be 'distance' or 'grad_norm'");
  }
  s.epsilon = j.value("epsilon", 1e-6);
  return s;
}

RunConfig run_config_of(const json& cfg, const Options& o, const std::vector<Index>& dims) {
  RunConfig rc;
  rc.method = parse_method(o.method.value_or(cfg.value("method", std::string("decoupled"))));
  rc.gamma = o.gamma.value_or(cfg.value("gamma", 0.1));
  rc.K = o.K.value_or(cfg.value("K", 1));
  rc.R = o.R.value_or(cfg.value("R", 100));
  rc.seed = o.seed.value_or(cfg.value("seed", std::uint64_t{0}));
  rc.norm_spec = cfg.contains("norm") ? norm_from_json(cfg.at("norm"), dims) : NormSpec::identity(dims);
  if (cfg.contains("init")) {
    rc.init = point_from_json(cfg.at("init"));
  } else {
    rc.init = JointPoint(dims);
    for (std::size_t b = 0; b < dims.size(); ++b) rc.init.block(b).setConstant(b % 2 == 0 ? 1.0 : -1.0);
  }
  if (cfg.contains("noise")) rc.noise = noise_from_json(cfg.at("noise"));
  const std::string source = cfg.value("noise_source", std::string("decoupled"));
  if (source == "decoupled") {
    rc.noise_source = NoiseSource::DecoupledOracle;
  } else if (source == "owner") {
    rc.noise_source = NoiseSource::OwnerOracles;
  } else {
    throw InvalidArgument("noise_source must be 'decoupled' or 'owner'");
  }
  if (cfg.contains("stop")) rc.stop = stop_of(cfg.at("stop"));
  if (o.epsilon) rc.stop = StopRule{StopMetric::Distance, *o.epsilon};
  if (cfg.contains("blowup")) rc.blowup = cfg.at("blowup").get<double>();
  return rc;
}

std::shared_ptr<NPlayerGame> random_nplayer(int N, const json& cfg, std::uint64_t seed) {
  const Index d = cfg.value("dim", 2);
  const double coupling = cfg.value("coupling_norm", 0.1);
  RngStream rng(seed, 0);
  std::vector<Matrix> own;
  std::vector<std::vector<Matrix>> cross(N, std::vector<Matrix>(N));
  for (int n = 0; n < N; ++n) own.push_back(random_spd(d, EigenRange{}, rng));
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < N; ++k)
      if (k != n) cross[n][k] = random_coupling(d, d, coupling, EigenRange{}, rng);
  return std::make_shared<QuadraticNPlayerGame>(std::move(own), std::move(cross));
}

void emit_traces(const std::vector<RunTrace>& traces, const Options& o) {
  Output out(o.out_path);
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& t : traces) arr.push_back(to_json(t));
    out.stream() << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < traces.size(); ++i) write_trace_csv(out.stream(), traces[i], i == 0);
}

int cmd_run(const Options& o) {
  const json cfg = load_config(o.config_path);
  const int trials = o.trials.value_or(cfg.value("trials", 1));
  if (trials < 1) throw InvalidArgument("--trials must be >= 1");
  std::vector<RunTrace> traces;

  if (cfg.contains("federated")) {
    const FederatedProblem p = federated_from_json(cfg.at("federated"));
    const std::string algorithm = cfg.value("algorithm", std::string("decoupled"));
    for (int t = 0; t < trials; ++t) {
      FederatedRunConfig fc;
      fc.gamma = o.gamma.value_or(cfg.value("gamma", 0.1));
      fc.K = o.K.value_or(cfg.value("K", 1));
      fc.R = o.R.value_or(cfg.value("R", 100));
      fc.seed = o.seed.value_or(cfg.value("seed", std::uint64_t{0})) + static_cast<std::uint64_t>(t);
      fc.init = cfg.contains("init") ? point_from_json(cfg.at("init")) : JointPoint(p.block_dims());
      if (cfg.contains("stop")) fc.stop = stop_of(cfg.at("stop"));
      if (algorithm == "decoupled") {
        traces.push_back(federated_decoupled_run(p, fc));
      } else if (algorithm == "local_sgda") {
        traces.push_back(local_sgda_mclient(p, fc));
      } else {
        throw InvalidArgument("algorithm must be 'decoupled' or 'local_sgda'");
      }
    }
    emit_traces(traces, o);
    return 0;
  }

  const bool nplayer = o.players.has_value() || cfg.contains("nplayer");
  if (nplayer) {
    std::shared_ptr<NPlayerGame> g;
    if (cfg.contains("nplayer")) {
      g = nplayer_from_json(cfg.at("nplayer"));
      if (o.players && static_cast<std::size_t>(*o.players) != g->num_players()) {
        throw DimensionError("--players " + std::to_string(*o.players) + " does not match the " +
                             std::to_string(g->num_players()) + "-player game in the config");
      }
    } else {
      if (*o.players < 1) throw InvalidArgument("--players must be >= 1");
      g = random_nplayer(*o.players, cfg, o.seed.value_or(0));
    }
    for (int t = 0; t < trials; ++t) {
      RunConfig rc = run_config_of(cfg, o, g->block_dims());
      rc.seed += static_cast<std::uint64_t>(t);
      traces.push_back(decoupled_sgd_run(*g, rc));
    }
    emit_traces(traces, o);
    return 0;
  }

  const auto game = game_of(cfg);
  const std::string algorithm = cfg.value("algorithm", std::string("solver"));
  for (int t = 0; t < trials; ++t) {
    RunConfig rc = run_config_of(cfg, o, game->block_dims());
    rc.seed += static_cast<std::uint64_t>(t);
    traces.push_back(algorithm == "local_sgda" ? two_oracle_local_sgda(*game, rc) : run(*game, rc));
  }
  emit_traces(traces, o);
  return 0;
}

int cmd_sweep(const Options& o) {
  const json cfg = load_config(o.config_path);
  std::string experiment = o.experiment;
  if (experiment.empty()) experiment = cfg.value("experiment", std::string());
  if (experiment.empty()) throw InvalidArgument("sweep needs --experiment or an 'experiment' key in the config");
  SweepSpec spec = sweep_spec_from_json(cfg, default_spec(experiment));
  spec.experiment = experiment;
  if (o.seed) spec.seed = *o.seed;
  if (o.trials) spec.trials = *o.trials;
  if (o.threads) spec.threads = *o.threads;
  if (o.epsilon) spec.epsilon = *o.epsilon;
  Output out(o.out_path);
  write_sweep_csv(out.stream(), run_sweep(spec));
  return 0;
}

int cmd_classify(const Options& o) {
  const json cfg = load_config(o.config_path);
  const auto game = game_of(cfg);
  const QuadraticGame& q = quadratic_of(game);
  const NormSpec ns = cfg.contains("norm") ? norm_from_json(cfg.at("norm"), q.block_dims())
                                           : NormSpec::identity(q.block_dims());
  Output out(o.out_path);
  out.stream() << to_json(classify(analyze(q, ns))).dump(2) << '\n';
  return 0;
}

int cmd_bound(const Options& o) {
  const json cfg = load_config(o.config_path);
  const auto game = game_of(cfg);
  const QuadraticGame& q = quadratic_of(game);
  const NormSpec ns = cfg.contains("norm") ? norm_from_json(cfg.at("norm"), q.block_dims())
                                           : NormSpec::identity(q.block_dims());
  const SpectralConstants c = analyze(q, ns);
  const RegimeReport report = classify(c);
  const BoundBranch target = report.regime == Regime::General ? BoundBranch::General : BoundBranch::Weakly;
  const Hyperparams hp = prescribed_hyperparams(c, target, cfg.value("K_hint", 10LL));
  const double gamma = o.gamma.value_or(cfg.value("gamma", hp.gamma));
  const int K = o.K.value_or(cfg.value("K", static_cast<int>(hp.K)));
  const int R = o.R.value_or(cfg.value("R", 10));
  const double D = cfg.value("D", 1.0);
  const double sigma_bar = cfg.value("sigma_bar", 0.0);
  std::optional<BoundBranch> force;
  if (cfg.contains("branch")) force = cfg.at("branch") == "weakly" ? BoundBranch::Weakly : BoundBranch::General;
  const RateBound qb = quadratic_rate_bound(q, gamma, K, R, D);
  json j{{"regime", regime_name(report.regime)},
         {"prescribed", to_json(hp)},
         {"gamma", gamma},
         {"K", K},
         {"R", R},
         {"D", D},
         {"sigma_bar", sigma_bar},
         {"bound", to_json(theoretical_bound(c, R, K, gamma, D, sigma_bar, force))},
         {"quadratic_rate_bound",
          {{"value", qb.value},
           {"vacuous", qb.vacuous},
           {"weakly_coupled", qb.weakly_coupled},
           {"within_hypotheses", qb.within_hypotheses}}}};
  Output out(o.out_path);
  out.stream() << j.dump(2) << '\n';
  return 0;
}

int cmd_verify_closed_form(const Options& o) {
  const int trials = o.trials.value_or(500);
  const std::uint64_t seed = o.seed.value_or(0);
  double max_err = 0.0;
  double worst_matrix_err = 0.0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(seed, static_cast<std::uint64_t>(t));
    const Index du = 1 + static_cast<Index>(rng.uniform() * o.max_dim);
    const Index dv = 1 + static_cast<Index>(rng.uniform() * o.max_dim);
    const QuadraticGame g = random_quadratic(std::min<Index>(du, o.max_dim), std::min<Index>(dv, o.max_dim),
                                             rng.uniform(0.0, 3.0), EigenRange{}, rng);
    const int K = 1 + static_cast<int>(rng.uniform() * o.max_K);
    const SpectralConstants c = analyze(g);
    const double gamma = rng.uniform(0.05, 1.0) / std::max(c.L_u, c.L_v);
    const JointPoint x0 = random_point(g.block_dims(), 1.0, rng);
    const NormSpec ns = NormSpec::identity(g.block_dims());
    const JointPoint loop = decoupled_round(g, x0, gamma, K, ns);
    const JointPoint exact = explicit_iterate(g, x0, gamma, K);
    max_err = std::max(max_err, (loop.flat() - exact.flat()).cwiseAbs().maxCoeff());
    const RoundMatrix rm = round_matrix(g, gamma, K);
    worst_matrix_err = std::max(worst_matrix_err, (rm.M * x0.flat() - exact.flat()).cwiseAbs().maxCoeff());
  }
  json j{{"trials", trials},
         {"max_abs_error", max_err},
         {"max_round_matrix_error", worst_matrix_err},
         {"tolerance", 1e-10},
         {"passed", max_err <= 1e-10 && worst_matrix_err <= 1e-10}};
  Output out(o.out_path);
  out.stream() << j.dump(2) << '\n';
  return max_err <= 1e-10 && worst_matrix_err <= 1e-10 ? 0 : 1;
}

int cmd_complexity(const Options& o) {
  const json cfg = load_config(o.config_path);
  const auto game = game_of(cfg);
  const QuadraticGame& q = quadratic_of(game);
  const NormSpec ns = cfg.contains("norm") ? norm_from_json(cfg.at("norm"), q.block_dims())
                                           : NormSpec::identity(q.block_dims());
  const double eps = o.epsilon.value_or(cfg.value("epsilon", 1e-6));
  Output out(o.out_path);
  out.stream() << to_json(complexity_table_row(analyze(q, ns), eps)).dump(2) << '\n';
  return 0;
}

void print_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoupled SGDA solvers, regime analysis and experiment sweeps"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON configuration file");
    sub->add_option("--out", o.out_path, "Output file (default: stdout)");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--trials", o.trials, "Number of trials / seeds");
  };

  auto* run = app.add_subcommand("run", "Run a solver and emit its trace");
  add_common(run);
  run->add_option("--method", o.method, "decoupled, gda, alt_gda, eg, ogda or ghost");
  run->add_option("--players", o.players, "Run the N-player solver with N players");
  run->add_option("--gamma", o.gamma, "Stepsize");
  run->add_option("-K,--local-steps", o.K, "Local steps per round");
  run->add_option("-R,--rounds", o.R, "Round budget");
  run->add_option("--epsilon", o.epsilon, "Stop when the distance to equilibrium drops below this");
  run->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep and emit CSV");
  add_common(sweep);
  sweep->add_option("--experiment", o.experiment, "trajectory, eigen, toygan, noise or ghost");
  sweep->add_option("--threads", o.threads, "Worker threads");
  sweep->add_option("--epsilon", o.epsilon, "Accuracy threshold");

  auto* cls = app.add_subcommand("classify", "Regime report of a quadratic game (JSON)");
  add_common(cls);

  auto* bound = app.add_subcommand("bound", "Rate bounds and prescribed hyperparameters (JSON)");
  add_common(bound);
  bound->add_option("--gamma", o.gamma, "Stepsize (default: prescribed)");
  bound->add_option("-K,--local-steps", o.K, "Local steps (default: prescribed)");
  bound->add_option("-R,--rounds", o.R, "Rounds");

  auto* verify = app.add_subcommand("verify-closed-form", "Loop solver vs exact iterates on random games");
  add_common(verify);
  verify->add_option("--max-dim", o.max_dim, "Largest block dimension");
  verify->add_option("--max-K", o.max_K, "Largest number of local steps");

  auto* table = app.add_subcommand("complexity-table", "Communication complexity row (JSON)");
  add_common(table);
  table->add_option("--epsilon", o.epsilon, "Target accuracy in (0, 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what(), 64);
    return 64;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*cls) return cmd_classify(o);
    if (*bound) return cmd_bound(o);
    if (*verify) return cmd_verify_closed_form(o);
    if (*table) return cmd_complexity(o);
  } catch (const DivergenceError& e) {
    print_error(e.kind(), e.what(), 3);
    return 3;
  } catch (const Error& e) {
    print_error(e.kind(), e.what(), 2);
    return 2;
  } catch (const json::exception& e) {
    print_error("invalid_config", e.what(), 2);
    return 2;
  } catch (const std::exception& e) {
    print_error("internal", e.what(), 1);
    return 1;
  }
  return 0;
}
