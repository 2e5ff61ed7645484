#include <cmath>
#include <limits>
#include <string>

#include "cbcc/bandit.hpp"
#include "cbcc/errors.hpp"

namespace cbcc {

void HyperParams::validate() const {
  if (!(r_scale > 0.0) || !std::isfinite(r_scale)) {
    throw InvalidParameter("r_scale must be > 0");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidParameter("epsilon must be in (0, 1]");
  if (!(gamma_conf > 0.0 && gamma_conf <= 1.0)) {
    throw InvalidParameter("gamma_conf must be in (0, 1]");
  }
  if (!(s0 > 0.0) || !(f0 > 0.0) || !std::isfinite(s0) || !std::isfinite(f0)) {
    throw InvalidParameter("Beta priors s0 and f0 must be > 0");
  }
  if (window == 0) throw InvalidParameter("window must be >= 1");
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InvalidParameter("xi must be > 0");
}

double compute_v(double r_scale, double epsilon, double gamma_conf, std::size_t dim) {
  if (!(r_scale > 0.0) || !std::isfinite(r_scale)) {
    throw InvalidParameter("r_scale must be > 0");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidParameter("epsilon must be in (0, 1]");
  if (!(gamma_conf > 0.0 && gamma_conf <= 1.0)) {
    throw InvalidParameter("gamma_conf must be in (0, 1]");
  }
  if (dim == 0) throw InvalidParameter("context dimension must be >= 1");
  return r_scale * std::sqrt((24.0 / epsilon) * static_cast<double>(dim) *
                             std::log(1.0 / gamma_conf));
}

double compute_v(const HyperParams& hyper, std::size_t dim) {
  return compute_v(hyper.r_scale, hyper.epsilon, hyper.gamma_conf, dim);
}

void check_reward(int reward) {
  if (reward != 0 && reward != 1) throw InvalidReward(reward);
}

ArmIndex argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw InvalidParameter("argmax over an empty score list");
  ArmIndex best = 0;
  double best_score = std::isnan(scores[0]) ? -std::numeric_limits<double>::infinity()
                                             : scores[0];
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > best_score) {
      best = i;
      best_score = scores[i];
    }
  }
  return best;
}

}  // namespace cbcc
