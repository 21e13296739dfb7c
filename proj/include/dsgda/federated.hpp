#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "dsgda/game.hpp"
#include "dsgda/solver.hpp"

namespace dsgda {

/// M client games sharing dimensions, aggregated by uniform averaging.
///
/// Client m draws gradient noise from stream `stream_id + m` with standard
/// deviation `sigma` per block (Euclidean). The global game is the average.
class FederatedProblem {
 public:
  FederatedProblem(std::vector<std::shared_ptr<const TwoPlayerGame>> clients, double sigma = 0.0,
                   std::uint64_t stream_id = 0);

  std::size_t num_clients() const { return clients_.size(); }
  const TwoPlayerGame& client(std::size_t m) const { return *clients_.at(m); }
  const std::vector<std::shared_ptr<const TwoPlayerGame>>& clients() const { return clients_; }
  double sigma() const { return sigma_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::vector<Index> block_dims() const { return clients_.front()->block_dims(); }

  bool all_quadratic() const;
  /// Averaged (A, B, C, linear terms); throws Unsupported unless all clients are quadratic.
  QuadraticGame averaged_quadratic() const;
  /// The global game f = (1/M) sum f_m.
  const TwoPlayerGame& global() const { return *global_; }

 private:
  std::vector<std::shared_ptr<const TwoPlayerGame>> clients_;
  double sigma_;
  std::uint64_t stream_id_;
  std::shared_ptr<const TwoPlayerGame> global_;
};

struct FederatedRunConfig {
  double gamma = 0.1;
  int K = 1;
  int R = 1;
  JointPoint init;
  std::uint64_t seed = 0;
  std::optional<StopRule> stop;
  bool record_steps = false;
};

/// Two local copies per round: player u evolves x^u with its oracle G_u
/// (sigma_uu, sigma_uv), player v evolves x^v with G_v (sigma_vu, sigma_vv);
/// the round ends with x <- (x^u + x^v) / 2. Uses cfg.noise and cfg.norm_spec
/// (block-wise P^{-1}); noise draws use (cfg.seed, noise stream).
RunTrace two_oracle_local_sgda(const TwoPlayerGame& game, const RunConfig& cfg);

/// Algorithm with 2M clients: u-clients step on u against the broadcast v,
/// v-clients step on v against the broadcast u, then each block is averaged.
RunTrace federated_decoupled_run(const FederatedProblem& p, const FederatedRunConfig& cfg);

/// Every client runs K GDA steps on both blocks of its own game; the server
/// averages both blocks.
RunTrace local_sgda_mclient(const FederatedProblem& p, const FederatedRunConfig& cfg);

/// max_m max(||grad_u f_m(x*)||, ||grad_v f_m(x*)||) at the global saddle.
double measure_zeta_star(const FederatedProblem& p);

struct FederatedConstants {
  /// max over clients of max(||A_m||, ||B_m||, ||C_m||).
  double L = 0.0;
  /// min of the extreme strong convexity / concavity of the averaged game.
  double mu = 0.0;
};

FederatedConstants federated_constants(const FederatedProblem& p);

struct FederatedRateBound {
  double value = 0.0;
  bool within_hypotheses = true;
  double exponential_term = 0.0;
  double heterogeneity_term = 0.0;
  double drift_noise_term = 0.0;
  double averaged_noise_term = 0.0;
};

/// D^2 exp(-gamma mu K R / 2) + 96 K^2 L^2 gamma^2 zeta^2 / mu^2
///   + 6 K L^2 gamma^2 sigma^2 / mu^2 + 2 gamma sigma^2 / (M mu);
/// hypotheses: gamma <= mu / (32 L^2 K).
FederatedRateBound federated_rate_bound(const FederatedConstants& c, double gamma, int K, int R, int M, double D,
                              double sigma, double zeta_star);

}  // namespace dsgda
