#include "cbcc/environment.hpp"

#include <cmath>
#include <string>

#include "cbcc/errors.hpp"

namespace cbcc {

CorruptionProcess::CorruptionProcess(double p_corrupt, Vector range_min, Vector range_max,
                                     const RngStream& rng)
    : p_(p_corrupt),
      lo_(std::move(range_min)),
      hi_(std::move(range_max)),
      mask_rng_(rng.derive("corruption-mask")),
      noise_rng_(rng.derive("corruption-noise")) {
  if (!(p_ >= 0.0 && p_ <= 1.0)) throw InvalidParameter("p_corrupt must be in [0, 1]");
  if (lo_.size() != hi_.size()) {
    throw DimensionMismatch(static_cast<std::size_t>(lo_.size()),
                            static_cast<std::size_t>(hi_.size()), "feature range bounds");
  }
  for (Eigen::Index j = 0; j < lo_.size(); ++j) {
    if (!(lo_(j) <= hi_(j))) {
      throw InvalidParameter("feature range " + std::to_string(j) + " has min > max");
    }
  }
}

std::pair<ContextVector, bool> CorruptionProcess::corrupt(const ContextVector& c) {
  if (c.size() != lo_.size()) {
    throw DimensionMismatch(dim(), static_cast<std::size_t>(c.size()), "context dimension");
  }
  // One mask draw per call whatever p is.
  const bool corrupted = mask_rng_.uniform() < p_;
  if (!corrupted) return {c, false};
  ContextVector noisy(c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const double u = noise_rng_.uniform();
    noisy(j) = lo_(j) + u * (hi_(j) - lo_(j));
    // Rounding can step just past hi when the span is large relative to lo.
    if (noisy(j) > hi_(j)) noisy(j) = hi_(j);
  }
  return {std::move(noisy), true};
}

CorruptionProcess make_corruption(const Dataset& ds, double p_corrupt, const RngStream& rng) {
  if (ds.normalized && ds.raw_min.size() == static_cast<Eigen::Index>(ds.dim()) &&
      ds.raw_max.size() == static_cast<Eigen::Index>(ds.dim())) {
    // Ranges of the full normalized data, even after subsampling: [0, 1] for
    // varying features, [0, 0] for constant ones.
    const Eigen::Index d = static_cast<Eigen::Index>(ds.dim());
    Vector lo = Vector::Zero(d);
    Vector hi(d);
    for (Eigen::Index j = 0; j < d; ++j) hi(j) = ds.raw_max(j) > ds.raw_min(j) ? 1.0 : 0.0;
    return CorruptionProcess(p_corrupt, std::move(lo), std::move(hi), rng);
  }
  auto [lo, hi] = feature_ranges(ds);
  return CorruptionProcess(p_corrupt, std::move(lo), std::move(hi), rng);
}

void RegretLedger::record(int reward) {
  check_reward(reward);
  reward_ += reward;
  optimal_ += 1;
  rewards_.push_back(static_cast<std::uint8_t>(reward));
}

Environment::Environment(std::shared_ptr<const Dataset> dataset, CorruptionProcess corruption)
    : dataset_(std::move(dataset)), corruption_(std::move(corruption)) {
  if (!dataset_ || dataset_->rows() == 0) throw EmptyDataset("environment needs a non-empty dataset");
  if (corruption_.dim() != dataset_->dim()) {
    throw DimensionMismatch(dataset_->dim(), corruption_.dim(), "corruption process dimension");
  }
}

const BanditRound& Environment::next_round() {
  if (awaiting_score_) {
    throw ProtocolViolation("next_round called before the previous round was scored");
  }
  const auto row = static_cast<Eigen::Index>(cursor_);
  const ContextVector truth = dataset_->features.row(row).transpose();
  auto [presented, corrupted] = corruption_.corrupt(truth);

  current_.t = ++t_;
  current_.instance = cursor_;
  current_.presented_context = std::move(presented);
  current_.true_label = dataset_->labels[cursor_];
  current_.was_corrupted = corrupted;
  awaiting_score_ = true;

  cursor_ = (cursor_ + 1) % dataset_->rows();
  return current_;
}

int Environment::step(ArmIndex chosen_arm) {
  if (!awaiting_score_) {
    throw ProtocolViolation(t_ == 0 ? "step called before any round was emitted"
                                    : "round " + std::to_string(t_) + " was already scored");
  }
  if (chosen_arm >= arms()) {
    throw InvalidParameter("arm index " + std::to_string(chosen_arm) + " out of range");
  }
  const int reward = chosen_arm == current_.true_label ? 1 : 0;
  ledger_.record(reward);
  awaiting_score_ = false;
  if (ledger_.cumulative_optimal() != static_cast<std::int64_t>(t_)) {
    throw ProtocolViolation("ledger optimal reward diverged from the round count");
  }
  return reward;
}

}  // namespace cbcc
