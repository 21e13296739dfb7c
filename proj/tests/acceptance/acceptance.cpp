// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: acceptance [criterion numbers...]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dsgda/closed_form.hpp"
#include "dsgda/federated.hpp"
#include "dsgda/game.hpp"
#include "dsgda/ghost.hpp"
#include "dsgda/harness.hpp"
#include "dsgda/nplayer.hpp"
#include "dsgda/random_games.hpp"
#include "dsgda/rng.hpp"
#include "dsgda/solver.hpp"
#include "dsgda/spectra.hpp"

using namespace dsgda;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> check;
};

int worker_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double max_point_gap(const RunTrace& a, const RunTrace& b) {
  if (a.rounds.size() != b.rounds.size()) return INFINITY;
  double gap = 0.0;
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    gap = std::max(gap, (a.rounds[r].point.flat() - b.rounds[r].point.flat()).cwiseAbs().maxCoeff());
  }
  return gap;
}

NormSpec random_norm(RngStream& rng, Index du, Index dv) {
  return NormSpec({rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)},
                  {random_spd(du, EigenRange{0.5, 2.0}, rng), random_spd(dv, EigenRange{0.5, 2.0}, rng)});
}

Outcome closed_form_equivalence() {
  RngStream rng(101, 0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Index du = 1 + static_cast<Index>(rng.uniform() * 8), dv = 1 + static_cast<Index>(rng.uniform() * 8);
    const int K = 1 + static_cast<int>(rng.uniform() * 20);
    const QuadraticGame g = random_quadratic(du, dv, rng.uniform(0.0, 5.0), EigenRange{}, rng);
    const SpectralConstants c = analyze(g);
    RunConfig cfg;
    cfg.gamma = rng.uniform(0.05, 1.0) / std::max(c.L_u, c.L_v);
    cfg.K = K;
    cfg.R = 1;
    cfg.init = random_point({du, dv}, 1.0, rng);
    cfg.record_steps = true;
    const RunTrace t = run(g, cfg);
    for (const StepRecord& s : t.steps) {
      const JointPoint x = explicit_iterate(g, cfg.init, cfg.gamma, s.step);
      worst = std::max(worst, (x.flat() - s.point.flat()).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-10, "max_abs_err=" + fmt("%.3g", worst)};
}

Outcome fully_decoupled_one_round() {
  RngStream rng(102, 0);
  int bad = 0;
  int total = 0;
  for (int i = 0; i < 50; ++i, ++total) {
    const Index du = 1 + i % 5, dv = 1 + (i / 5) % 5;
    const QuadraticGame g = random_quadratic(du, dv, 0.0, EigenRange{}, rng);
    const SpectralConstants c = analyze(g);
    RunConfig cfg;
    cfg.gamma = c.mu_bar / (c.L_bar * c.L_bar);
    cfg.init = random_point({du, dv}, 3.0, rng);
    const double D2 = cfg.init.flat().squaredNorm();
    cfg.K = static_cast<int>(std::ceil(std::log(1e-12 / D2) / std::log(1.0 - cfg.gamma * c.mu_bar)));
    cfg.R = 3;
    const RunTrace t = run(g, cfg);
    int first = -1;
    for (const auto& r : t.rounds) {
      if (*r.dist_sq < 1e-12) {
        first = r.round;
        break;
      }
    }
    if (first != 1) ++bad;
  }
  return {bad == 0, std::to_string(total - bad) + "/" + std::to_string(total) + " games converge in exactly 1 round"};
}

Outcome weakly_coupled_rate() {
  RngStream rng(103, 0);
  int bad = 0;
  int games = 0;
  double worst_ratio = 0.0;
  while (games < 100) {
    const Index du = 1 + static_cast<Index>(rng.uniform() * 4), dv = 1 + static_cast<Index>(rng.uniform() * 4);
    const QuadraticGame g =
        random_quadratic_with_coupling_degree(du, dv, rng.uniform(0.01, 0.25), EigenRange{1.0, 5.0}, rng);
    const SpectralConstants c = analyze(g);
    if (c.kappa_c > 0.25) continue;
    ++games;
    const Hyperparams h = prescribed_hyperparams(c, BoundBranch::Weakly, 1);
    RunConfig cfg;
    cfg.gamma = h.gamma;
    cfg.K = static_cast<int>(h.K);
    cfg.R = 50;
    cfg.init = random_point({du, dv}, 1.0, rng);
    const RunTrace t = run(g, cfg);
    const double D2 = *t.rounds[0].dist_sq;
    bool ok = true;
    for (const auto& r : t.rounds) {
      const double bound = D2 * std::exp(-(1.0 - 4.0 * c.kappa_c) * r.round);
      if (*r.dist_sq > bound + 1e-12) ok = false;
      if (bound > 1e-12) worst_ratio = std::max(worst_ratio, *r.dist_sq / bound);
    }
    if (!ok) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " violations in 100 games; max dist^2/bound=" + fmt("%.3g", worst_ratio)};
}

Outcome communication_advantage_inequality() {
  RngStream rng(104, 0);
  int bad = 0;
  double worst_gap = 0.0;
  SpectralConstants worst;
  for (int i = 0; i < 10000; ++i) {
    const Index du = 1 + i % 4, dv = 1 + (i / 4) % 4;
    const QuadraticGame g =
        random_quadratic_with_coupling_degree(du, dv, rng.uniform(0.0, 0.25), EigenRange{}, rng);
    const SpectralConstants c = analyze(g);
    if (c.kappa_c > 0.25) continue;
    const double gap = 1.0 / (1.0 - 4.0 * c.kappa_c) - (c.kappa_u + c.kappa_v + c.kappa_uv * c.kappa_uv);
    if (gap > 1e-9) ++bad;
    if (gap > worst_gap) {
      worst_gap = gap;
      worst = c;
    }
  }
  std::string detail = std::to_string(bad) + "/10000 instances violate";
  if (bad > 0) {
    detail += "; worst kappa_c=" + fmt("%.4f", worst.kappa_c) + " lhs=" +
              fmt("%.4g", 1.0 / (1.0 - 4.0 * worst.kappa_c)) +
              " rhs=" + fmt("%.4g", worst.kappa_u + worst.kappa_v + worst.kappa_uv * worst.kappa_uv);
  }
  const SpectralConstants ce = analyze(QuadraticGame::scalar(1.0, 1.0, 0.2));
  detail += "; A=B=I,c=0.2: lhs=" + fmt("%.4g", 1.0 / (1.0 - 4.0 * ce.kappa_c)) +
            " rhs=" + fmt("%.4g", ce.kappa_u + ce.kappa_v + ce.kappa_uv * ce.kappa_uv);
  return {bad == 0, detail};
}

Outcome coupling_inequalities() {
  RngStream rng(105, 0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const Index du = 1 + i % 4, dv = 1 + (i / 4) % 4;
    const QuadraticGame g = random_quadratic(du, dv, rng.uniform(0.0, 5.0), EigenRange{}, rng);
    const NormSpec ns = i % 2 == 0 ? NormSpec::identity({du, dv}) : random_norm(rng, du, dv);
    const SpectralConstants c = analyze(g, ns);
    bool ok = c.L_c <= c.L + 1e-9 && c.L_bar <= c.L + 1e-9;
    const SpectralConstants e = analyze(g);
    const JointPoint bar = random_point({du, dv}, 2.0, rng);
    JointPoint best({du, dv});
    best.u() = -g.A().llt().solve(g.C() * bar.v());
    best.v() = g.B().llt().solve(g.C().transpose() * bar.u());
    ok = ok && best.flat().norm() <= e.kappa_c * bar.flat().norm() + 1e-9;
    if (!ok) ++bad;
  }
  return {bad == 0, std::to_string(bad) + "/1000 instances violate"};
}

Outcome eigen_sweep_crossover() {
  SweepSpec s = default_eigen_spec();
  s.methods = {"gda", "decoupled"};
  s.K_list = {50};
  s.epsilon = 1e-4;
  s.threads = worker_threads();
  const std::vector<SweepRow> rows = eigen_sweep(s);
  std::map<int, std::map<std::string, double>> rounds;
  std::map<int, double> kappa;
  for (const auto& r : rows) {
    rounds[r.cell][r.method] = r.metric_value;
    kappa[r.cell] = r.cell_params.at("kappa_c");
  }
  int weak_cells = 0, weak_losses = 0;
  std::optional<double> crossover;
  for (const auto& [cell, m] : rounds) {
    const bool dec_wins = m.at("decoupled") <= m.at("gda");
    if (kappa[cell] <= 0.25) {
      ++weak_cells;
      if (!dec_wins) ++weak_losses;
    }
    if (!dec_wins && !crossover) crossover = kappa[cell];
  }
  std::string detail = std::to_string(weak_cells - weak_losses) + "/" + std::to_string(weak_cells) +
                       " weakly coupled cells with decoupled <= gda; ";
  bool ok = weak_losses == 0;
  if (crossover) {
    const double ratio = *crossover / 0.25;
    detail += "crossover kappa_c=" + fmt("%.3g", *crossover) + " (" + fmt("%.3g", ratio) + "x the 1/4 threshold)";
    ok = ok && ratio >= 0.1 && ratio <= 10.0;
  } else {
    detail += "no crossover on the grid";
    ok = false;
  }
  return {ok, detail};
}

Outcome noise_robustness() {
  SweepSpec s = default_noise_spec();
  s.threads = worker_threads();
  const std::vector<SweepRow> rows = noise_sweep(s);
  std::map<std::string, std::map<double, double>> value;
  for (const auto& r : rows) value[r.method][r.cell_params.at("offdiag_variance")] = r.metric_value;
  const double d1 = value.at("decoupled").at(1.0), d10 = value.at("decoupled").at(10.0);
  const double l1 = value.at("local_sgda").at(1.0), l10 = value.at("local_sgda").at(10.0);
  const bool ok = d10 <= 2.0 * d1 && l10 >= 2.0 * l1;
  return {ok, "decoupled " + fmt("%.3g", d1) + " -> " + fmt("%.3g", d10) + " (x" + fmt("%.2f", d10 / d1) +
                  "), local_sgda " + fmt("%.3g", l1) + " -> " + fmt("%.3g", l10) + " (x" + fmt("%.2f", l10 / l1) +
                  ")"};
}

Outcome federated_bound() {
  const int problems = 50, seeds = 20, M = 4, K = 5, R = 100;
  const double sigma = 0.5;
  const auto verdicts = parallel_map<std::pair<bool, double>>(problems, worker_threads(), [&](int i) {
    RngStream rng(108, static_cast<std::uint64_t>(i));
    const Index d = 1 + i % 4;
    const auto game = std::make_shared<QuadraticGame>(random_quadratic(d, d, rng.uniform(0.1, 2.0),
                                                                       EigenRange{1.0, 4.0}, rng));
    const FederatedProblem p(std::vector<std::shared_ptr<const TwoPlayerGame>>(M, game), sigma,
                             static_cast<std::uint64_t>(i) * 16);
    const FederatedConstants c = federated_constants(p);
    FederatedRunConfig cfg;
    cfg.gamma = c.mu / (32.0 * c.L * c.L * K);
    cfg.K = K;
    cfg.R = R;
    cfg.init = random_point({d, d}, 1.0, rng);
    const double D = cfg.init.flat().norm();
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < seeds; ++s) {
      cfg.seed = static_cast<std::uint64_t>(s);
      const double x = *federated_decoupled_run(p, cfg).last().dist_sq;
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / seeds;
    const double var = std::max(0.0, (sum_sq - seeds * mean * mean) / (seeds - 1));
    const FederatedRateBound b = federated_rate_bound(c, cfg.gamma, K, R, M, D, sigma, measure_zeta_star(p));
    const double limit = b.value + 3.0 * std::sqrt(var / seeds);
    return std::make_pair(b.within_hypotheses && mean <= limit, mean / limit);
  });
  int bad = 0;
  double worst = 0.0;
  for (const auto& [ok, ratio] : verdicts) {
    if (!ok) ++bad;
    worst = std::max(worst, ratio);
  }
  return {bad == 0, std::to_string(bad) + "/50 problems exceed; max mean/(bound+3se)=" + fmt("%.3g", worst)};
}

Outcome reductions() {
  RngStream rng(109, 0);
  double gda_gap = 0.0, nplayer_gap = 0.0, fed_gap = 0.0, ghost_gap = 0.0;
  for (int i = 0; i < 30; ++i) {
    const Index du = 1 + i % 3, dv = 1 + (i / 3) % 3;
    const auto g = std::make_shared<QuadraticGame>(random_quadratic(du, dv, rng.uniform(0.0, 3.0), EigenRange{}, rng));
    RunConfig cfg;
    cfg.gamma = 0.02;
    cfg.K = 1;
    cfg.R = 20;
    cfg.seed = static_cast<std::uint64_t>(i);
    cfg.init = random_point({du, dv}, 1.0, rng);
    cfg.norm_spec = random_norm(rng, du, dv);
    cfg.noise = NoiseModel(NoiseLevels{0.3, 2.0, 2.0, 0.4, 0.5}, 0, static_cast<std::uint64_t>(i));

    RunConfig gda = cfg;
    gda.method = Method::Gda;
    gda_gap = std::max(gda_gap, max_point_gap(run(*g, cfg), run(*g, gda)));

    RunConfig multi = cfg;
    multi.K = 1 + i % 6;
    for (NoiseSource src : {NoiseSource::DecoupledOracle, NoiseSource::OwnerOracles}) {
      multi.noise_source = src;
      nplayer_gap = std::max(nplayer_gap, max_point_gap(run(*g, multi), decoupled_sgd_run(MinimaxAsNPlayer(g), multi)));
    }

    const double sigma = 0.4;
    const std::uint64_t stream = 7 + static_cast<std::uint64_t>(i);
    RunConfig owner = cfg;
    owner.K = multi.K;
    owner.norm_spec = NormSpec::identity({du, dv});
    owner.noise = NoiseModel(NoiseLevels{sigma, 0.0, 0.0, sigma, 0.0}, 0, stream);
    owner.noise_source = NoiseSource::OwnerOracles;
    FederatedRunConfig fc;
    fc.gamma = owner.gamma;
    fc.K = owner.K;
    fc.R = owner.R;
    fc.seed = owner.seed;
    fc.init = owner.init;
    const FederatedProblem single(std::vector<std::shared_ptr<const TwoPlayerGame>>{g}, sigma, stream);
    fed_gap = std::max(fed_gap, max_point_gap(run(*g, owner), federated_decoupled_run(single, fc)));

    RunConfig first = multi;
    first.R = 1;
    RunConfig ghost = first;
    ghost.method = Method::Ghost;
    ghost_gap = std::max(ghost_gap, max_point_gap(run(*g, first), run(*g, ghost)));
  }
  const double worst = std::max({gda_gap, nplayer_gap, fed_gap, ghost_gap});
  return {worst <= 1e-12, "K=1 vs GDA " + fmt("%.2g", gda_gap) + ", N=2 " + fmt("%.2g", nplayer_gap) +
                              ", federated M=1 " + fmt("%.2g", fed_gap) + ", ghost round 1 " + fmt("%.2g", ghost_gap)};
}

Outcome toygan_gradients_fd() {
  RngStream rng(110, 0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Index m = 1 + i % 4;
    const ToyGanGame g(random_spd(m, EigenRange{0.5, 2.0}, rng), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
    const JointPoint x = random_point({m, m * m}, 1.0, rng);
    const JointPoint grad = toygan_gradients(g, x);
    const double h = 1e-5;
    Vector fd(x.dim());
    for (Index j = 0; j < x.dim(); ++j) {
      JointPoint p = x, q = x;
      p.flat()(j) += h;
      q.flat()(j) -= h;
      fd(j) = (g.value(p.u(), p.v()) - g.value(q.u(), q.v())) / (2.0 * h);
    }
    worst = std::max(worst, (fd - grad.flat()).norm() / std::max(grad.flat().norm(), 1e-12));
  }
  return {worst <= 1e-5, "max relative error " + fmt("%.3g", worst)};
}

Outcome ghost_vs_plain() {
  SweepSpec s = default_ghost_spec();
  s.cells = {25, 15};
  s.threads = worker_threads();
  const std::vector<SweepRow> rows = ghost_comparison(s);
  std::map<std::pair<int, int>, std::map<std::string, const SweepRow*>> by;
  for (const auto& r : rows) by[{r.cell, r.K}][r.method] = &r;
  bool ok = true;
  std::ostringstream detail;
  for (const auto& [key, m] : by) {
    const SweepRow* plain = m.at("decoupled");
    const auto it = m.find("ghost");
    const bool ghost_ok = it != m.end() && !it->second->censored &&
                          (plain->censored || it->second->metric_value <= plain->metric_value);
    ok = ok && ghost_ok;
    detail << "c=" << s.cells[key.first] << ",K=" << key.second << ": ghost "
           << (it == m.end() ? std::string("n/a")
                             : (it->second->censored ? std::string("censored")
                                                     : std::to_string(static_cast<int>(it->second->metric_value))))
           << " vs decoupled " << static_cast<int>(plain->metric_value) << (plain->censored ? " (censored)" : "")
           << "; ";
  }
  std::string text = detail.str();
  if (text.size() >= 2) text.resize(text.size() - 2);
  return {ok, text};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "closed-form-equivalence", 10, closed_form_equivalence},
      {2, "fully-decoupled-one-round", 1, fully_decoupled_one_round},
      {3, "weakly-coupled-rate", 60, weakly_coupled_rate},
      {4, "communication-advantage-inequality", 5, communication_advantage_inequality},
      {5, "coupling-constant-inequalities", 10, coupling_inequalities},
      {6, "eigen-sweep-crossover", 300, eigen_sweep_crossover},
      {7, "unbalanced-noise-robustness", 120, noise_robustness},
      {8, "federated-bound-conformance", 120, federated_bound},
      {9, "reductions", 5, reductions},
      {10, "toygan-gradients", 1, toygan_gradients_fd},
      {11, "ghost-vs-decoupled", 30, ghost_vs_plain},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool passed = o.passed && in_time;
    if (!passed) ++failures;
    std::printf("%s %2d %-36s %s [%.2fs / %.0fs%s]\n", passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
