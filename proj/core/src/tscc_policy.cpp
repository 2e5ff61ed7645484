#include "cbcc/bandit.hpp"
#include "cbcc/errors.hpp"

namespace cbcc {

TsccState TsccState::fresh(std::size_t arms, std::size_t dim, const HyperParams& hyper) {
  if (arms == 0) throw InvalidParameter("TSCC needs at least one arm");
  hyper.validate();
  TsccState state;
  state.linear.reserve(arms);
  for (std::size_t k = 0; k < arms; ++k) state.linear.emplace_back(dim);
  state.beta.assign(arms, BetaArmState::prior(hyper.s0, hyper.f0));
  // The meta-bandit reuses the arm-level priors.
  state.meta = {BetaArmState::prior(hyper.s0, hyper.f0),
                BetaArmState::prior(hyper.s0, hyper.f0)};
  state.v = compute_v(hyper, dim);
  state.hyper = hyper;
  return state;
}

int choose_policy(double theta_noncontextual, double theta_contextual) noexcept {
  return theta_contextual >= theta_noncontextual ? kContextual : kNonContextual;
}

int tscc_select_policy(const std::array<BetaArmState, 2>& meta, RngStream& rng) {
  const double theta0 = sample_beta(meta[kNonContextual].s, meta[kNonContextual].f, rng);
  const double theta1 = sample_beta(meta[kContextual].s, meta[kContextual].f, rng);
  return choose_policy(theta0, theta1);
}

namespace {

void check_alpha(int alpha) {
  if (alpha != kContextual && alpha != kNonContextual) {
    throw InvalidParameter("policy flag alpha must be 0 or 1");
  }
}

void check_context(const TsccState& state, const ContextVector& c) {
  if (static_cast<std::size_t>(c.size()) != state.dim()) {
    throw DimensionMismatch(state.dim(), static_cast<std::size_t>(c.size()),
                            "context dimension");
  }
}

}  // namespace

ArmIndex tscc_select_arm(const TsccState& state, const ContextVector& c, int alpha,
                         RngStream& rng) {
  check_alpha(alpha);
  check_context(state, c);
  // argmax_k alpha * c^T mu_tilde_k + (1 - alpha) * theta_k; alpha is binary,
  // so only one of the two terms needs to be sampled.
  if (alpha == kContextual) return cts_select(state.linear, c, state.v, rng);
  return beta_ts_select(state.beta, rng);
}

void tscc_update(TsccState& state, const ContextVector& c, ArmIndex chosen_arm, int alpha,
                 int reward) {
  check_reward(reward);
  check_alpha(alpha);
  check_context(state, c);
  if (chosen_arm >= state.arms()) {
    throw InvalidParameter("arm index " + std::to_string(chosen_arm) + " out of range");
  }
  // Corruption is undetectable, so both sub-models learn from every round.
  state.linear[chosen_arm].update(c, reward);
  state.beta[chosen_arm] = beta_update(state.beta[chosen_arm], reward);
  state.meta[static_cast<std::size_t>(alpha)] =
      beta_update(state.meta[static_cast<std::size_t>(alpha)], reward);
}

}  // namespace cbcc
