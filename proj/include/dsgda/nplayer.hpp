#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "dsgda/game.hpp"
#include "dsgda/solver.hpp"

namespace dsgda {

/// N-player game given by each player's gradient of its own cost.
class NPlayerGame {
 public:
  virtual ~NPlayerGame() = default;

  virtual std::vector<Index> block_dims() const = 0;
  /// grad_{x^n} f_n(x), written into `out` (dimension of block n).
  virtual void own_gradient(std::size_t n, const JointPoint& x, OutRef out) const = 0;
  virtual std::optional<JointPoint> equilibrium() const { return std::nullopt; }

  std::size_t num_players() const { return block_dims().size(); }
  void require_fits(const JointPoint& x, const char* what) const { x.require_layout(block_dims(), what); }
};

/// f_n(x) = 1/2 x_n' A_n x_n + x_n' sum_{j != n} C_nj x_j.
class QuadraticNPlayerGame final : public NPlayerGame {
 public:
  /// `cross[n][j]` is C_nj (d_n x d_j); diagonal entries are ignored and may be empty.
  QuadraticNPlayerGame(std::vector<Matrix> own, std::vector<std::vector<Matrix>> cross);

  std::vector<Index> block_dims() const override { return dims_; }
  void own_gradient(std::size_t n, const JointPoint& x, OutRef out) const override;
  std::optional<JointPoint> equilibrium() const override { return JointPoint(dims_); }

  const Matrix& own(std::size_t n) const { return own_.at(n); }
  const Matrix& cross(std::size_t n, std::size_t j) const { return cross_.at(n).at(j); }
  /// Stacked Jacobian of the game operator.
  Matrix jacobian() const;

 private:
  std::vector<Index> dims_;
  std::vector<Matrix> own_;
  std::vector<std::vector<Matrix>> cross_;
};

/// Two-player minimax game seen as N = 2 with f_1 = f and f_2 = -f.
class MinimaxAsNPlayer final : public NPlayerGame {
 public:
  explicit MinimaxAsNPlayer(std::shared_ptr<const TwoPlayerGame> game) : game_(std::move(game)) {}

  std::vector<Index> block_dims() const override { return game_->block_dims(); }
  void own_gradient(std::size_t n, const JointPoint& x, OutRef out) const override;
  std::optional<JointPoint> equilibrium() const override { return game_->saddle(); }

 private:
  std::shared_ptr<const TwoPlayerGame> game_;
};

/// Stacked gradients with every block n evaluated at x_ref with its own block
/// replaced by x's.
JointPoint nplayer_operator_F_bar(const NPlayerGame& g, const JointPoint& x, const JointPoint& x_ref);
JointPoint nplayer_operator_F(const NPlayerGame& g, const JointPoint& x);

/// Decoupled SGD: each player takes K steps on its own block against the
/// round-start point, x^n <- x^n - gamma (alpha_n P_n)^{-1} grad_n f_n. Only
/// Method::Decoupled is accepted.
RunTrace decoupled_sgd_run(const NPlayerGame& g, const RunConfig& cfg);

/// Regime constants of the quadratic N-player family.
struct NPlayerConstants {
  std::vector<double> mu;
  /// Cross-smoothness of player n: sigma_max of its scaled cross row.
  std::vector<double> cross_L;
  double mu_bar = 0.0;
  double L_c = 0.0;
  double kappa_c = 0.0;
};

NPlayerConstants nplayer_constants(const QuadraticNPlayerGame& g, const NormSpec& ns);

}  // namespace dsgda
