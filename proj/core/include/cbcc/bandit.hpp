#pragma once

// Posterior state and selection rules for the four bandit policies:
// Beta-Bernoulli Thompson Sampling, sliding-window UCB, linear contextual
// Thompson Sampling, and the hybrid that picks between the contextual and
// non-contextual samplers with a two-armed Beta meta-bandit.

#include <array>
#include <cstddef>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "cbcc/numerics.hpp"
#include "cbcc/rng.hpp"

namespace cbcc {

using ContextVector = Vector;
using ArmIndex = std::size_t;

// Meta-policy flag: which sub-policy made the decision.
inline constexpr int kNonContextual = 0;
inline constexpr int kContextual = 1;

struct HyperParams {
  double r_scale = 0.25;    // R
  double epsilon = 0.5;     // in (0, 1]
  double gamma_conf = 0.1;  // in (0, 1]
  double s0 = 1.0;          // Beta prior successes
  double f0 = 1.0;          // Beta prior failures
  std::size_t window = 100; // SW-UCB window W
  double xi = 0.5;          // SW-UCB exploration constant

  // Throws InvalidParameter on any out-of-range field.
  void validate() const;
};

// Exploration scale v = R * sqrt((24 / epsilon) * d * ln(1 / gamma)).
double compute_v(double r_scale, double epsilon, double gamma_conf, std::size_t dim);
double compute_v(const HyperParams& hyper, std::size_t dim);

// Throws InvalidReward unless reward is 0 or 1.
void check_reward(int reward);

// Index of the largest score; ties go to the lowest index and NaN never
// wins over a number. Throws InvalidParameter on an empty span.
ArmIndex argmax_lowest(std::span<const double> scores);

// ---------------------------------------------------------------------------
// Beta-Bernoulli arm

struct BetaArmState {
  double s = 1.0;
  double f = 1.0;
  double s0 = 1.0;
  double f0 = 1.0;

  static BetaArmState prior(double s0, double f0);

  double pulls() const noexcept { return s + f - s0 - f0; }
  double mean() const noexcept { return s / (s + f); }

  friend bool operator==(const BetaArmState&, const BetaArmState&) = default;
};

BetaArmState beta_update(BetaArmState state, int reward);

// One Beta draw per arm, in index order.
std::vector<double> beta_draws(std::span<const BetaArmState> arms, RngStream& rng);
ArmIndex beta_ts_select(std::span<const BetaArmState> arms, RngStream& rng);

// ---------------------------------------------------------------------------
// Linear-Gaussian arm (ridge statistics)

// B = I + sum c c^T, g = sum c r, mu_hat = B^{-1} g.
//
// B^{-1} is kept by Sherman-Morrison and rebuilt from a fresh factorization
// of B every kRefreshInterval updates. A Cholesky factor of B is maintained
// by O(d^2) rank-one updates and used to draw posterior samples.
class LinearArmState {
 public:
  static constexpr std::size_t kRefreshInterval = 1000;

  explicit LinearArmState(std::size_t dim);

  // State with explicit statistics; b must be symmetric positive definite.
  static LinearArmState from_statistics(const Matrix& b, const Vector& g);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(g_.size()); }
  const Matrix& b() const noexcept { return b_; }
  const Matrix& b_inv() const noexcept { return b_inv_; }
  const Vector& g() const noexcept { return g_; }
  const Vector& mu_hat() const noexcept { return mu_hat_; }
  std::size_t updates() const noexcept { return updates_; }

  void update(const ContextVector& c, int reward);

  // Draw from N(mu_hat, v^2 B^{-1}); consumes dim() standard normals.
  Vector sample_weights(double v, RngStream& rng) const;

 private:
  void refresh();

  Matrix b_;
  Matrix b_inv_;
  Vector g_;
  Vector mu_hat_;
  CholeskyFactor b_factor_;
  std::size_t updates_ = 0;
  std::size_t since_refresh_ = 0;
};

LinearArmState cts_update(LinearArmState arm, const ContextVector& c, int reward);

// argmax_k c^T mu_tilde_k with one posterior draw per arm, in index order.
ArmIndex cts_select(std::span<const LinearArmState> arms, const ContextVector& c, double v,
                    RngStream& rng);

// ---------------------------------------------------------------------------
// Sliding-window UCB

// Per-arm buffer of the W most recent (round, reward) pulls. round() is the
// 1-based index of the round about to be played.
class SlidingWindowState {
 public:
  SlidingWindowState(std::size_t arms, std::size_t window, double xi);

  std::size_t arms() const noexcept { return buffers_.size(); }
  std::size_t window() const noexcept { return window_; }
  double xi() const noexcept { return xi_; }
  std::size_t round() const noexcept { return round_; }

  std::size_t window_pulls(ArmIndex arm) const { return buffers_.at(arm).size(); }
  double window_mean(ArmIndex arm) const;
  const std::deque<std::pair<std::size_t, int>>& history(ArmIndex arm) const {
    return buffers_.at(arm);
  }

  // mean + sqrt(xi * ln(min(t, W)) / n); +inf for an arm with no pulls in window.
  double index(ArmIndex arm) const;

  // Records this round's pull and advances to the next round.
  void record(ArmIndex arm, int reward);

 private:
  std::vector<std::deque<std::pair<std::size_t, int>>> buffers_;
  std::vector<int> window_sums_;
  std::size_t window_;
  double xi_;
  std::size_t round_ = 1;
};

ArmIndex swucb_select(const SlidingWindowState& state);

// ---------------------------------------------------------------------------
// Hybrid contextual / non-contextual Thompson Sampling

struct TsccState {
  std::vector<LinearArmState> linear;
  std::vector<BetaArmState> beta;
  // Indexed by the policy flag: meta[kNonContextual], meta[kContextual].
  std::array<BetaArmState, 2> meta;
  double v = 0.0;
  HyperParams hyper;

  static TsccState fresh(std::size_t arms, std::size_t dim, const HyperParams& hyper);

  std::size_t arms() const noexcept { return beta.size(); }
  std::size_t dim() const noexcept { return linear.empty() ? 0 : linear.front().dim(); }
};

// kContextual when theta1 >= theta0, else kNonContextual.
int choose_policy(double theta_noncontextual, double theta_contextual) noexcept;

// Draws theta for meta[0] then meta[1].
int tscc_select_policy(const std::array<BetaArmState, 2>& meta, RngStream& rng);

// alpha = 1: cts_select over the linear states; alpha = 0: beta_ts_select
// over the Beta states. Only the draws the chosen sub-policy needs are taken.
ArmIndex tscc_select_arm(const TsccState& state, const ContextVector& c, int alpha,
                         RngStream& rng);

// Updates the chosen arm's linear and Beta posteriors and meta[alpha].
void tscc_update(TsccState& state, const ContextVector& c, ArmIndex chosen_arm, int alpha,
                 int reward);

}  // namespace cbcc
