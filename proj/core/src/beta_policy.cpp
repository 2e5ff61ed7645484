#include "cbcc/bandit.hpp"
#include "cbcc/errors.hpp"

namespace cbcc {

BetaArmState BetaArmState::prior(double s0, double f0) {
  if (!(s0 > 0.0) || !(f0 > 0.0)) throw InvalidParameter("Beta priors must be > 0");
  return BetaArmState{s0, f0, s0, f0};
}

BetaArmState beta_update(BetaArmState state, int reward) {
  check_reward(reward);
  state.s += reward;
  state.f += 1 - reward;
  return state;
}

std::vector<double> beta_draws(std::span<const BetaArmState> arms, RngStream& rng) {
  std::vector<double> theta;
  theta.reserve(arms.size());
  for (const auto& arm : arms) theta.push_back(sample_beta(arm.s, arm.f, rng));
  return theta;
}

ArmIndex beta_ts_select(std::span<const BetaArmState> arms, RngStream& rng) {
  const auto theta = beta_draws(arms, rng);
  return argmax_lowest(theta);
}

}  // namespace cbcc
