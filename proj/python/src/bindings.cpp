#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dsgda/closed_form.hpp"
#include "dsgda/csv.hpp"
#include "dsgda/federated.hpp"
#include "dsgda/game.hpp"
#include "dsgda/harness.hpp"
#include "dsgda/io.hpp"
#include "dsgda/solver.hpp"
#include "dsgda/spectra.hpp"

namespace py = pybind11;
using namespace dsgda;

namespace {

NormSpec norm_for(const TwoPlayerGame& g, const std::optional<std::pair<double, double>>& alphas) {
  const auto dims = g.block_dims();
  if (!alphas) return NormSpec::identity(dims);
  return NormSpec::weighted(dims, {alphas->first, alphas->second});
}

NoiseSource parse_source(const std::string& s) {
  if (s == "decoupled") return NoiseSource::DecoupledOracle;
  if (s == "owner") return NoiseSource::OwnerOracles;
  throw InvalidArgument("noise_source must be 'decoupled' or 'owner', got '" + s + "'");
}

Vector trace_column(const RunTrace& t, double (*get)(const RoundRecord&)) {
  Vector out(static_cast<Index>(t.rounds.size()));
  for (std::size_t i = 0; i < t.rounds.size(); ++i) out[static_cast<Index>(i)] = get(t.rounds[i]);
  return out;
}

py::dict trace_dict(const RunTrace& t) {
  py::dict d;
  d["method"] = t.method;
  d["K"] = t.K;
  d["gamma"] = t.gamma;
  d["seed"] = t.seed;
  d["status"] = status_name(t.status);
  if (t.clients > 0) d["clients"] = t.clients;
  d["dist_sq"] = trace_column(t, [](const RoundRecord& r) { return r.dist_sq.value_or(NAN); });
  d["grad_norm"] = trace_column(t, [](const RoundRecord& r) { return r.grad_norm; });
  d["oracle_calls"] = trace_column(t, [](const RoundRecord& r) { return static_cast<double>(r.oracle_calls); });
  Matrix points(static_cast<Index>(t.rounds.size()), t.rounds.empty() ? 0 : t.rounds.front().point.dim());
  for (std::size_t i = 0; i < t.rounds.size(); ++i) points.row(static_cast<Index>(i)) = t.rounds[i].point.flat();
  d["points"] = points;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decoupled stochastic gradient descent ascent for two-player and N-player games.";

  auto& base_error = py::register_exception<Error>(m, "DsgdaError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", base_error.ptr());

  py::class_<TwoPlayerGame, std::shared_ptr<TwoPlayerGame>>(m, "TwoPlayerGame")
      .def_property_readonly("dim_u", &TwoPlayerGame::dim_u)
      .def_property_readonly("dim_v", &TwoPlayerGame::dim_v)
      .def("value", [](const TwoPlayerGame& g, const Vector& u, const Vector& v) { return g.value(u, v); })
      .def("operator", [](const TwoPlayerGame& g, const Vector& u, const Vector& v) {
        const JointPoint F = operator_F(g, JointPoint::two_player(u, v));
        return py::make_tuple(Vector(F.u()), Vector(F.v()));
      }, "Stacked field (grad_u f, -grad_v f).")
      .def("saddle", [](const TwoPlayerGame& g) -> py::object {
        const auto s = g.saddle();
        if (!s) return py::none();
        return py::make_tuple(Vector(s->u()), Vector(s->v()));
      });

  py::class_<QuadraticGame, TwoPlayerGame, std::shared_ptr<QuadraticGame>>(m, "QuadraticGame")
      .def(py::init([](const Matrix& A, const Matrix& B, const Matrix& C, std::optional<Vector> lu,
                       std::optional<Vector> lv) {
             if (lu || lv) {
               return QuadraticGame(A, B, C, lu.value_or(Vector::Zero(A.rows())), lv.value_or(Vector::Zero(B.rows())));
             }
             return QuadraticGame(A, B, C);
           }),
           py::arg("A"), py::arg("B"), py::arg("C"), py::arg("linear_u") = py::none(),
           py::arg("linear_v") = py::none())
      .def_static("scalar", &QuadraticGame::scalar, py::arg("a"), py::arg("b"), py::arg("c"))
      .def_property_readonly("A", &QuadraticGame::A)
      .def_property_readonly("B", &QuadraticGame::B)
      .def_property_readonly("C", &QuadraticGame::C)
      .def("jacobian", &QuadraticGame::jacobian);

  py::class_<ToyGanGame, TwoPlayerGame, std::shared_ptr<ToyGanGame>>(m, "ToyGanGame")
      .def(py::init<Matrix, double, double>(), py::arg("sigma"), py::arg("lambda1") = 0.0,
           py::arg("lambda2") = 0.0)
      .def("gradients", [](const ToyGanGame& g, const Vector& u, const Vector& v) {
        const JointPoint d = toygan_gradients(g, JointPoint::two_player(u, v));
        return py::make_tuple(Vector(d.u()), Vector(d.v()));
      });

  m.def("game_from_json", [](const std::string& text) { return game_from_json(json::parse(text)); },
        py::arg("config"));

  py::class_<SpectralConstants>(m, "SpectralConstants")
#define DSGDA_FIELD(name) .def_readonly(#name, &SpectralConstants::name)
      DSGDA_FIELD(alpha_u) DSGDA_FIELD(alpha_v) DSGDA_FIELD(mu_u) DSGDA_FIELD(mu_v) DSGDA_FIELD(L_u)
      DSGDA_FIELD(L_v) DSGDA_FIELD(L_uv) DSGDA_FIELD(L_vu) DSGDA_FIELD(mu_bar) DSGDA_FIELD(L_bar) DSGDA_FIELD(L)
      DSGDA_FIELD(mu) DSGDA_FIELD(L_c) DSGDA_FIELD(kappa_u) DSGDA_FIELD(kappa_v) DSGDA_FIELD(kappa_uv)
      DSGDA_FIELD(kappa) DSGDA_FIELD(kappa_c) DSGDA_FIELD(kappa_c_quadratic)
#undef DSGDA_FIELD
      .def("__repr__", [](const SpectralConstants& c) { return to_json(c).dump(); });

  m.def("analyze", [](const QuadraticGame& g, std::optional<std::pair<double, double>> alphas) {
    return analyze(g, norm_for(g, alphas));
  }, py::arg("game"), py::arg("alphas") = py::none());

  m.def("classify", [](const QuadraticGame& g) {
    const RegimeReport r = classify(analyze(g));
    py::dict d;
    d["regime"] = regime_name(r.regime);
    d["kappa_c"] = r.constants.kappa_c;
    d["foam_condition_holds"] = r.foam_condition_holds;
    d["quadratic_weakly_coupled"] = r.quadratic_weakly_coupled;
    return d;
  });

  m.def("rate_bound", [](const QuadraticGame& g, int R, int K, double gamma, double D, double sigma_bar) {
    const BoundResult b = theoretical_bound(analyze(g), R, K, gamma, D, sigma_bar);
    py::dict d;
    d["value"] = b.value;
    d["branch"] = b.branch == BoundBranch::Weakly ? "weakly" : "general";
    d["within_hypotheses"] = b.within_hypotheses;
    d["violations"] = b.violations;
    return d;
  }, py::arg("game"), py::arg("R"), py::arg("K"), py::arg("gamma"), py::arg("D"), py::arg("sigma_bar") = 0.0);

  m.def("run", [](const TwoPlayerGame& g, const std::string& method, double gamma, int K, int R, const Vector& u0,
                  const Vector& v0, std::uint64_t seed, double sigma_bar, double sigma_uu, double sigma_vv,
                  const std::string& noise_source, std::optional<double> stop_epsilon,
                  std::optional<std::pair<double, double>> alphas) {
    RunConfig cfg;
    cfg.method = parse_method(method);
    cfg.gamma = gamma;
    cfg.K = K;
    cfg.R = R;
    cfg.init = JointPoint::two_player(u0, v0);
    cfg.seed = seed;
    cfg.norm_spec = norm_for(g, alphas);
    if (sigma_bar > 0.0 || sigma_uu > 0.0 || sigma_vv > 0.0) {
      cfg.noise = NoiseModel(NoiseLevels{sigma_uu, 0.0, 0.0, sigma_vv, sigma_bar}, seed);
    }
    cfg.noise_source = parse_source(noise_source);
    if (stop_epsilon) cfg.stop = StopRule{g.saddle() ? StopMetric::Distance : StopMetric::GradNorm, *stop_epsilon};
    RunTrace t;
    {
      py::gil_scoped_release release;
      t = run(g, cfg);
    }
    return trace_dict(t);
  },
  py::arg("game"), py::arg("method") = "decoupled", py::arg("gamma"), py::arg("K") = 1, py::arg("R") = 1,
  py::arg("u0"), py::arg("v0"), py::arg("seed") = 0, py::arg("sigma_bar") = 0.0, py::arg("sigma_uu") = 0.0,
  py::arg("sigma_vv") = 0.0, py::arg("noise_source") = "decoupled", py::arg("stop_epsilon") = py::none(),
  py::arg("alphas") = py::none());

  m.def("explicit_iterate", [](const QuadraticGame& g, const Vector& u0, const Vector& v0, double gamma, long long k) {
    const JointPoint x = explicit_iterate(g, JointPoint::two_player(u0, v0), gamma, k);
    return py::make_tuple(Vector(x.u()), Vector(x.v()));
  }, py::arg("game"), py::arg("u0"), py::arg("v0"), py::arg("gamma"), py::arg("k"));

  m.def("round_matrix", [](const QuadraticGame& g, double gamma, long long K) {
    const RoundMatrix rm = round_matrix(g, gamma, K);
    py::dict d;
    d["M"] = rm.M;
    d["norm"] = rm.norm;
    d["norm_bound"] = rm.norm_bound;
    return d;
  }, py::arg("game"), py::arg("gamma"), py::arg("K"));

  m.def("federated_run", [](const std::vector<std::shared_ptr<QuadraticGame>>& clients, const std::string& algorithm,
                            double gamma, int K, int R, const Vector& u0, const Vector& v0, double sigma,
                            std::uint64_t seed) {
    std::vector<std::shared_ptr<const TwoPlayerGame>> cs(clients.begin(), clients.end());
    const FederatedProblem p(std::move(cs), sigma);
    FederatedRunConfig cfg;
    cfg.gamma = gamma;
    cfg.K = K;
    cfg.R = R;
    cfg.init = JointPoint::two_player(u0, v0);
    cfg.seed = seed;
    if (algorithm == "decoupled") return trace_dict(federated_decoupled_run(p, cfg));
    if (algorithm == "local_sgda") return trace_dict(local_sgda_mclient(p, cfg));
    throw InvalidArgument("algorithm must be 'decoupled' or 'local_sgda'");
  },
  py::arg("clients"), py::arg("algorithm") = "decoupled", py::arg("gamma"), py::arg("K"), py::arg("R"),
  py::arg("u0"), py::arg("v0"), py::arg("sigma") = 0.0, py::arg("seed") = 0);

  m.def("sweep_csv", [](const std::string& config) {
    const json j = json::parse(config);
    const SweepSpec spec = sweep_spec_from_json(j, default_spec(j.at("experiment").get<std::string>()));
    std::vector<SweepRow> rows;
    {
      py::gil_scoped_release release;
      rows = run_sweep(spec);
    }
    std::ostringstream os;
    write_sweep_csv(os, rows);
    return os.str();
  }, py::arg("config"), "Runs an experiment sweep from a JSON config and returns the CSV text.");
}
