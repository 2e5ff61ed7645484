#include <cmath>
#include <vector>

#include "cbcc/bandit.hpp"
#include "cbcc/errors.hpp"

namespace cbcc {

LinearArmState::LinearArmState(std::size_t dim)
    : b_(Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))),
      b_inv_(b_),
      g_(Vector::Zero(static_cast<Eigen::Index>(dim))),
      mu_hat_(g_),
      b_factor_(CholeskyFactor::identity(dim)) {
  if (dim == 0) throw InvalidParameter("context dimension must be >= 1");
}

LinearArmState LinearArmState::from_statistics(const Matrix& b, const Vector& g) {
  if (b.rows() != g.size()) {
    throw DimensionMismatch(static_cast<std::size_t>(b.rows()),
                            static_cast<std::size_t>(g.size()));
  }
  LinearArmState arm(static_cast<std::size_t>(g.size()));
  arm.b_ = SpdMatrix(b).matrix();
  arm.g_ = g;
  arm.refresh();
  arm.mu_hat_ = arm.b_inv_ * arm.g_;
  return arm;
}

void LinearArmState::refresh() {
  b_factor_ = cholesky(SpdMatrix(b_));
  b_inv_ = inverse_from_factor(b_factor_);
  since_refresh_ = 0;
}

void LinearArmState::update(const ContextVector& c, int reward) {
  check_reward(reward);
  if (c.size() != g_.size()) {
    throw DimensionMismatch(dim(), static_cast<std::size_t>(c.size()), "context dimension");
  }
  if (!c.allFinite()) throw InvalidParameter("context has non-finite entries");

  // Contexts are often sparse (bag-of-words features); the outer product
  // and B^{-1} c only touch the nonzero coordinates.
  std::vector<Eigen::Index> nonzero;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c(i) != 0.0) nonzero.push_back(i);
  }
  Vector u = Vector::Zero(c.size());
  for (Eigen::Index j : nonzero) {
    b_.col(j) += c * c(j);
    u += b_inv_.col(j) * c(j);
  }
  const double denom = 1.0 + c.dot(u);
  const double innovation = static_cast<double>(reward) - c.dot(mu_hat_);
  symmetric_rank_one_downdate(b_inv_, u, denom);
  if (reward != 0) g_ += c;
  // Recursive least squares: mu' = mu + B'^{-1} c (r - c^T mu) = mu + u (r - c^T mu) / denom.
  mu_hat_ += u * (innovation / denom);
  b_factor_.rank_one_update(c);
  ++updates_;
  if (++since_refresh_ >= kRefreshInterval) {
    refresh();
    mu_hat_.noalias() = b_inv_ * g_;
  }
}

Vector LinearArmState::sample_weights(double v, RngStream& rng) const {
  return sample_mvn_precision(mu_hat_, v, b_factor_, rng);
}

LinearArmState cts_update(LinearArmState arm, const ContextVector& c, int reward) {
  arm.update(c, reward);
  return arm;
}

ArmIndex cts_select(std::span<const LinearArmState> arms, const ContextVector& c, double v,
                    RngStream& rng) {
  if (arms.empty()) throw InvalidParameter("cts_select needs at least one arm");
  std::vector<double> scores;
  scores.reserve(arms.size());
  for (const auto& arm : arms) {
    if (arm.dim() != static_cast<std::size_t>(c.size())) {
      throw DimensionMismatch(arm.dim(), static_cast<std::size_t>(c.size()),
                              "context dimension");
    }
    scores.push_back(c.dot(arm.sample_weights(v, rng)));
  }
  return argmax_lowest(scores);
}

}  // namespace cbcc
