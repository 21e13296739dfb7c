#pragma once

#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "dsgda/federated.hpp"
#include "dsgda/game.hpp"
#include "dsgda/harness.hpp"
#include "dsgda/nplayer.hpp"
#include "dsgda/solver.hpp"
#include "dsgda/spectra.hpp"

namespace dsgda {

using json = nlohmann::json;

/// Dense matrix from a row-major array of rows, a flat array with "rows" and
/// "cols", or a single number (1 x 1).
Matrix matrix_from_json(const json& j, const char* what);
Vector vector_from_json(const json& j, const char* what);
json matrix_to_json(const Matrix& M);
json vector_to_json(const Vector& v);

/// Two-player game: {"type": "quadratic" | "scalar" | "random" | "toygan", ...}.
std::shared_ptr<TwoPlayerGame> game_from_json(const json& j);
/// {"alphas": [...], "blocks": [matrix, ...]}; missing blocks mean identity.
NormSpec norm_from_json(const json& j, const std::vector<Index>& dims);
/// {"u": [...], "v": [...]} or {"blocks": [[...], ...]}.
JointPoint point_from_json(const json& j);
/// {"sigma_uu", "sigma_uv", "sigma_vu", "sigma_vv", "sigma_bar", "seed", "stream_id", "player_sigmas"}.
NoiseModel noise_from_json(const json& j);
/// {"type": "quadratic_nplayer", "own": [...], "cross": [[...]]} or {"type": "minimax", "game": {...}}.
std::shared_ptr<NPlayerGame> nplayer_from_json(const json& j);
/// {"clients": [game, ...], "sigma": s, "stream_id": n}.
FederatedProblem federated_from_json(const json& j);
/// Overrides fields of `base` with the keys present in `j`.
SweepSpec sweep_spec_from_json(const json& j, SweepSpec base);

json to_json(const SpectralConstants& c);
json to_json(const RegimeReport& r);
json to_json(const ComplexityRow& row);
json to_json(const BoundResult& b);
json to_json(const Hyperparams& h);
json to_json(const RunTrace& t);

}  // namespace dsgda
