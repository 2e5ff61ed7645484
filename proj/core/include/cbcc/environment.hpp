#pragma once

// The corrupted-context interaction protocol over a labeled dataset:
// emit an instance (cyclically), replace its context with noise with
// probability p, score the agent's arm against the hidden label.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cbcc/bandit.hpp"
#include "cbcc/dataio.hpp"
#include "cbcc/rng.hpp"

namespace cbcc {

// Replaces a context, with probability p, by a vector whose entries are
// drawn independently and uniformly from each feature's [min, max].
// The corruption mask and the replacement values come from separate
// substreams, so for a fixed seed the set of corrupted rounds at a lower p
// is a subset of those at a higher p.
class CorruptionProcess {
 public:
  CorruptionProcess(double p_corrupt, Vector range_min, Vector range_max, const RngStream& rng);

  double probability() const noexcept { return p_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(lo_.size()); }
  const Vector& range_min() const noexcept { return lo_; }
  const Vector& range_max() const noexcept { return hi_; }

  std::pair<ContextVector, bool> corrupt(const ContextVector& c);

 private:
  double p_;
  Vector lo_;
  Vector hi_;
  RngStream mask_rng_;
  RngStream noise_rng_;
};

// Ranges are the full-data normalized ranges for a normalized dataset,
// otherwise the per-feature min/max of its current features.
CorruptionProcess make_corruption(const Dataset& ds, double p_corrupt, const RngStream& rng);

// What the agent is allowed to see of a round.
struct ObservedRound {
  std::size_t t = 0;
  ContextVector context;
};

struct BanditRound {
  std::size_t t = 0;         // 1-based round index
  std::size_t instance = 0;  // dataset row
  ContextVector presented_context;
  ArmIndex true_label = 0;     // hidden from the agent
  bool was_corrupted = false;  // hidden from the agent; logged for analysis

  ObservedRound observed() const { return {t, presented_context}; }
};

// Optimal reward is 1 every round (the true-label arm), so regret equals
// the misclassification count.
class RegretLedger {
 public:
  void record(int reward);

  std::int64_t cumulative_reward() const noexcept { return reward_; }
  std::int64_t cumulative_optimal() const noexcept { return optimal_; }
  std::int64_t cumulative_regret() const noexcept { return optimal_ - reward_; }
  std::size_t rounds() const noexcept { return rewards_.size(); }
  const std::vector<std::uint8_t>& rewards() const noexcept { return rewards_; }

 private:
  std::int64_t reward_ = 0;
  std::int64_t optimal_ = 0;
  std::vector<std::uint8_t> rewards_;
};

class Environment {
 public:
  Environment(std::shared_ptr<const Dataset> dataset, CorruptionProcess corruption);

  std::size_t arms() const noexcept { return dataset_->classes(); }
  std::size_t dim() const noexcept { return dataset_->dim(); }
  const Dataset& dataset() const noexcept { return *dataset_; }
  const RegretLedger& ledger() const noexcept { return ledger_; }
  std::size_t rounds_emitted() const noexcept { return t_; }

  // Emits the instance at the cursor and advances it cyclically. Throws
  // ProtocolViolation if the previous round has not been scored.
  const BanditRound& next_round();

  // Reward 1 iff arm == true label. Throws ProtocolViolation unless exactly
  // one emitted round is awaiting a score.
  int step(ArmIndex chosen_arm);

 private:
  std::shared_ptr<const Dataset> dataset_;
  CorruptionProcess corruption_;
  RegretLedger ledger_;
  std::size_t cursor_ = 0;
  std::size_t t_ = 0;
  BanditRound current_;
  bool awaiting_score_ = false;
};

}  // namespace cbcc
