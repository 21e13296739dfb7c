#include "dsgda/io.hpp"

#include <string>

#include "dsgda/random_games.hpp"

namespace dsgda {
namespace {

[[noreturn]] void bad(const std::string& what, const std::string& why) { throw InvalidArgument(what + ": " + why); }

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(key, "expected a number");
  return j.at(key).get<double>();
}

std::uint64_t unsigned_value(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad(key, "expected an integer");
  return j.at(key).get<std::uint64_t>();
}

}  // namespace

Matrix matrix_from_json(const json& j, const char* what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (j.is_object()) {
    const auto rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
    const auto& data = j.at("data");
    if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols) {
      bad(what, "data must hold rows*cols numbers");
    }
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index k = 0; k < cols; ++k) M(i, k) = data.at(i * cols + k).get<double>();
    return M;
  }
  if (!j.is_array() || j.empty()) bad(what, "expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (!j.front().is_array()) bad(what, "expected an array of rows");
  const Index cols = static_cast<Index>(j.front().size());
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      bad(what, "row " + std::to_string(i) + " has the wrong length");
    }
    for (Index k = 0; k < cols; ++k) M(i, k) = row.at(k).get<double>();
  }
  return M;
}

Vector vector_from_json(const json& j, const char* what) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) bad(what, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::shared_ptr<TwoPlayerGame> game_from_json(const json& j) {
  if (!j.is_object()) bad("game", "expected an object");
  const std::string type = j.value("type", "quadratic");
  if (type == "scalar") {
    return std::make_shared<QuadraticGame>(
        QuadraticGame::scalar(number(j, "a", 1.0), number(j, "b", 1.0), number(j, "c", 0.0)));
  }
  if (type == "quadratic") {
    Matrix A = matrix_from_json(j.at("A"), "A");
    Matrix B = matrix_from_json(j.at("B"), "B");
    Matrix C = j.contains("C") ? matrix_from_json(j.at("C"), "C") : Matrix::Zero(A.rows(), B.rows());
    Vector bu = j.contains("linear_u") ? vector_from_json(j.at("linear_u"), "linear_u") : Vector();
    Vector bv = j.contains("linear_v") ? vector_from_json(j.at("linear_v"), "linear_v") : Vector();
    return std::make_shared<QuadraticGame>(std::move(A), std::move(B), std::move(C), std::move(bu), std::move(bv));
  }
  if (type == "random") {
    RngStream rng(unsigned_value(j, "seed", 0), unsigned_value(j, "stream", 0));
    const EigenRange range{number(j, "eig_lo", 1.0), number(j, "eig_hi", 10.0)};
    const Index du = j.value("dim_u", 5), dv = j.value("dim_v", du);
    return std::make_shared<QuadraticGame>(random_quadratic(du, dv, number(j, "coupling_norm", 1.0), range, rng));
  }
  if (type == "toygan") {
    return std::make_shared<ToyGanGame>(matrix_from_json(j.at("sigma"), "sigma"), number(j, "lambda1", 0.0),
                                        number(j, "lambda2", 0.0));
  }
  bad("game", "unknown type '" + type + "'");
}

NormSpec norm_from_json(const json& j, const std::vector<Index>& dims) {
  if (j.is_null()) return NormSpec::identity(dims);
  std::vector<double> alphas(dims.size(), 1.0);
  if (j.contains("alphas")) alphas = j.at("alphas").get<std::vector<double>>();
  if (alphas.size() != dims.size()) {
    throw DimensionError("norm: " + std::to_string(alphas.size()) + " alphas for " + std::to_string(dims.size()) +
                         " blocks");
  }
  std::vector<Matrix> blocks;
  if (j.contains("blocks")) {
    const auto& b = j.at("blocks");
    if (!b.is_array() || b.size() != dims.size()) throw DimensionError("norm: need one block matrix per player");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      blocks.push_back(b.at(i).is_null() ? Matrix::Identity(dims[i], dims[i])
                                         : matrix_from_json(b.at(i), "norm block"));
      if (blocks.back().rows() != dims[i]) {
        throw DimensionError("norm: block " + std::to_string(i) + " has dimension " +
                             std::to_string(blocks.back().rows()) + ", expected " + std::to_string(dims[i]));
      }
    }
  } else {
    for (Index d : dims) blocks.push_back(Matrix::Identity(d, d));
  }
  return NormSpec(std::move(alphas), std::move(blocks));
}

JointPoint point_from_json(const json& j) {
  if (j.contains("blocks")) {
    std::vector<Vector> blocks;
    for (const auto& b : j.at("blocks")) blocks.push_back(vector_from_json(b, "point block"));
    return JointPoint::from_blocks(blocks);
  }
  return JointPoint::two_player(vector_from_json(j.at("u"), "u"), vector_from_json(j.at("v"), "v"));
}

NoiseModel noise_from_json(const json& j) {
  NoiseLevels lv;
  lv.uu = number(j, "sigma_uu", 0.0);
  lv.uv = number(j, "sigma_uv", 0.0);
  lv.vu = number(j, "sigma_vu", 0.0);
  lv.vv = number(j, "sigma_vv", 0.0);
  lv.bar = number(j, "sigma_bar", 0.0);
  std::vector<double> players;
  if (j.contains("player_sigmas")) players = j.at("player_sigmas").get<std::vector<double>>();
  return NoiseModel(lv, unsigned_value(j, "seed", 0), unsigned_value(j, "stream_id", 0), std::move(players));
}

std::shared_ptr<NPlayerGame> nplayer_from_json(const json& j) {
  const std::string type = j.value("type", "quadratic_nplayer");
  if (type == "minimax") return std::make_shared<MinimaxAsNPlayer>(game_from_json(j.at("game")));
  if (type != "quadratic_nplayer") bad("nplayer game", "unknown type '" + type + "'");
  std::vector<Matrix> own;
  for (const auto& m : j.at("own")) own.push_back(matrix_from_json(m, "own"));
  const std::size_t N = own.size();
  std::vector<std::vector<Matrix>> cross(N, std::vector<Matrix>(N));
  if (j.contains("cross")) {
    const auto& c = j.at("cross");
    if (!c.is_array() || c.size() != N) throw DimensionError("nplayer game: cross must have one row per player");
    for (std::size_t n = 0; n < N; ++n) {
      if (!c.at(n).is_array() || c.at(n).size() != N) {
        throw DimensionError("nplayer game: cross row " + std::to_string(n) + " must have one entry per player");
      }
      for (std::size_t k = 0; k < N; ++k) {
        if (!c.at(n).at(k).is_null()) cross[n][k] = matrix_from_json(c.at(n).at(k), "cross");
      }
    }
  }
  return std::make_shared<QuadraticNPlayerGame>(std::move(own), std::move(cross));
}

FederatedProblem federated_from_json(const json& j) {
  std::vector<std::shared_ptr<const TwoPlayerGame>> clients;
  for (const auto& c : j.at("clients")) clients.push_back(game_from_json(c));
  return FederatedProblem(std::move(clients), number(j, "sigma", 0.0), unsigned_value(j, "stream_id", 0));
}

SweepSpec sweep_spec_from_json(const json& j, SweepSpec s) {
  if (j.contains("experiment")) s.experiment = j.at("experiment").get<std::string>();
  if (j.contains("methods")) s.methods = j.at("methods").get<std::vector<std::string>>();
  if (j.contains("K_list")) s.K_list = j.at("K_list").get<std::vector<int>>();
  if (j.contains("gamma_grid")) s.gamma_grid = j.at("gamma_grid").get<std::vector<double>>();
  if (j.contains("gamma_log_grid")) {
    const auto& g = j.at("gamma_log_grid");
    s.gamma_grid = log_grid(g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<int>());
  }
  if (j.contains("cells")) s.cells = j.at("cells").get<std::vector<double>>();
  if (j.contains("cells_log_grid")) {
    const auto& g = j.at("cells_log_grid");
    s.cells = log_grid(g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<int>());
  }
  if (j.contains("scalar_games")) s.scalar_games = j.at("scalar_games").get<std::vector<std::array<double, 3>>>();
  s.epsilon = number(j, "epsilon", s.epsilon);
  s.budget = j.value("budget", s.budget);
  s.trials = j.value("trials", s.trials);
  s.seed = unsigned_value(j, "seed", s.seed);
  s.dim = j.value("dim", s.dim);
  s.eigen_range.lo = number(j, "eig_lo", s.eigen_range.lo);
  s.eigen_range.hi = number(j, "eig_hi", s.eigen_range.hi);
  s.fixed_gamma = number(j, "gamma", s.fixed_gamma);
  s.diag_variance = number(j, "diag_variance", s.diag_variance);
  s.offdiag_variance = number(j, "offdiag_variance", s.offdiag_variance);
  s.coupling_norm = number(j, "coupling_norm", s.coupling_norm);
  if (j.contains("noise_mode")) {
    const std::string mode = j.at("noise_mode").get<std::string>();
    if (mode == "variance") {
      s.noise_mode = 0;
    } else if (mode == "coupling") {
      s.noise_mode = 1;
    } else {
      bad("noise_mode", "expected 'variance' or 'coupling'");
    }
  }
  s.init_u = number(j, "init_u", s.init_u);
  s.init_v = number(j, "init_v", s.init_v);
  s.blowup = number(j, "blowup", s.blowup);
  s.threads = j.value("threads", s.threads);
  return s;
}

json to_json(const SpectralConstants& c) {
  return json{{"alpha_u", c.alpha_u},
              {"alpha_v", c.alpha_v},
              {"mu_u", c.mu_u},
              {"mu_v", c.mu_v},
              {"L_u", c.L_u},
              {"L_v", c.L_v},
              {"L_uv", c.L_uv},
              {"L_vu", c.L_vu},
              {"mu_bar", c.mu_bar},
              {"L_bar", c.L_bar},
              {"L", c.L},
              {"mu", c.mu},
              {"L_c", c.L_c},
              {"kappa_u", c.kappa_u},
              {"kappa_v", c.kappa_v},
              {"kappa_uv", c.kappa_uv},
              {"kappa", c.kappa},
              {"kappa_c", c.kappa_c},
              {"kappa_c_quadratic", c.kappa_c_quadratic}};
}

json to_json(const RegimeReport& r) {
  return json{{"constants", to_json(r.constants)},
              {"regime", regime_name(r.regime)},
              {"foam_condition_holds", r.foam_condition_holds},
              {"quadratic_weakly_coupled", r.quadratic_weakly_coupled}};
}

json to_json(const ComplexityRow& row) {
  json rounds = json::object();
  for (const auto& [k, v] : row.rounds) rounds[k] = v;
  return json{{"label", row.label},
              {"rounds", rounds},
              {"decoupled_zero_communication", row.decoupled_zero_communication},
              {"decoupled_weak_branch", row.decoupled_weak_branch}};
}

json to_json(const BoundResult& b) {
  return json{{"value", b.value},
              {"branch", b.branch == BoundBranch::Weakly ? "weakly" : "general"},
              {"within_hypotheses", b.within_hypotheses},
              {"violations", b.violations}};
}

json to_json(const Hyperparams& h) {
  return json{{"gamma", h.gamma}, {"K", h.K}, {"fully_decoupled", h.fully_decoupled}, {"note", h.note}};
}

json to_json(const RunTrace& t) {
  json rounds = json::array();
  for (const auto& r : t.rounds) {
    rounds.push_back(json{{"round", r.round},
                          {"point", vector_to_json(r.point.flat())},
                          {"dist_sq", r.dist_sq ? json(*r.dist_sq) : json(nullptr)},
                          {"grad_norm", r.grad_norm},
                          {"comm_rounds", r.comm_rounds},
                          {"oracle_calls", r.oracle_calls}});
  }
  json out{{"method", t.method}, {"K", t.K},        {"gamma", t.gamma},
           {"seed", t.seed},     {"status", status_name(t.status)}, {"rounds", rounds}};
  if (t.clients > 0) out["clients"] = t.clients;
  return out;
}

}  // namespace dsgda
