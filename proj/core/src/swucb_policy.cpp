#include <algorithm>
#include <cmath>
#include <limits>

#include "cbcc/bandit.hpp"
#include "cbcc/errors.hpp"

namespace cbcc {

SlidingWindowState::SlidingWindowState(std::size_t arms, std::size_t window, double xi)
    : buffers_(arms), window_sums_(arms, 0), window_(window), xi_(xi) {
  if (arms == 0) throw InvalidParameter("sliding-window UCB needs at least one arm");
  if (window == 0) throw InvalidParameter("window must be >= 1");
  if (!(xi > 0.0)) throw InvalidParameter("xi must be > 0");
}

double SlidingWindowState::window_mean(ArmIndex arm) const {
  const auto& buf = buffers_.at(arm);
  if (buf.empty()) return 0.0;
  return static_cast<double>(window_sums_[arm]) / static_cast<double>(buf.size());
}

double SlidingWindowState::index(ArmIndex arm) const {
  const std::size_t n = window_pulls(arm);
  if (n == 0) return std::numeric_limits<double>::infinity();
  const double horizon = static_cast<double>(std::min(round_, window_));
  return window_mean(arm) + std::sqrt(xi_ * std::log(horizon) / static_cast<double>(n));
}

void SlidingWindowState::record(ArmIndex arm, int reward) {
  check_reward(reward);
  auto& buf = buffers_.at(arm);
  buf.emplace_back(round_, reward);
  window_sums_[arm] += reward;
  if (buf.size() > window_) {
    window_sums_[arm] -= buf.front().second;
    buf.pop_front();
  }
  ++round_;
}

ArmIndex swucb_select(const SlidingWindowState& state) {
  std::vector<double> scores(state.arms());
  for (ArmIndex k = 0; k < state.arms(); ++k) scores[k] = state.index(k);
  return argmax_lowest(scores);
}

}  // namespace cbcc
