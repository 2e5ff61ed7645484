#include "cbcc/policy.hpp"

#include <string>

#include "cbcc/errors.hpp"

namespace cbcc {

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "mab") return PolicyKind::kMab;
  if (name == "nsmab") return PolicyKind::kNsmab;
  if (name == "cmab") return PolicyKind::kCmab;
  if (name == "tscc") return PolicyKind::kTscc;
  throw InvalidParameter("unknown policy '" + std::string(name) +
                         "' (expected mab, nsmab, cmab or tscc)");
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kMab: return "mab";
    case PolicyKind::kNsmab: return "nsmab";
    case PolicyKind::kCmab: return "cmab";
    case PolicyKind::kTscc: return "tscc";
  }
  return "unknown";
}

namespace {

void check_arm(ArmIndex arm, std::size_t arms) {
  if (arm >= arms) {
    throw InvalidParameter("arm index " + std::to_string(arm) + " out of range");
  }
}

}  // namespace

BetaTsPolicy::BetaTsPolicy(std::size_t arms, const HyperParams& hyper) {
  if (arms == 0) throw InvalidParameter("policy needs at least one arm");
  hyper.validate();
  arms_.assign(arms, BetaArmState::prior(hyper.s0, hyper.f0));
}

Decision BetaTsPolicy::select(const ContextVector&, RngStream& rng) const {
  return {beta_ts_select(arms_, rng), -1};
}

void BetaTsPolicy::update(const ContextVector&, const Decision& decision, int reward) {
  check_arm(decision.arm, arms_.size());
  arms_[decision.arm] = beta_update(arms_[decision.arm], reward);
}

SlidingWindowUcbPolicy::SlidingWindowUcbPolicy(std::size_t arms, const HyperParams& hyper)
    : state_((hyper.validate(), arms), hyper.window, hyper.xi) {}

Decision SlidingWindowUcbPolicy::select(const ContextVector&, RngStream&) const {
  return {swucb_select(state_), -1};
}

void SlidingWindowUcbPolicy::update(const ContextVector&, const Decision& decision,
                                    int reward) {
  check_arm(decision.arm, state_.arms());
  state_.record(decision.arm, reward);
}

LinearTsPolicy::LinearTsPolicy(std::size_t arms, std::size_t dim, const HyperParams& hyper)
    : v_(compute_v(hyper, dim)) {
  if (arms == 0) throw InvalidParameter("policy needs at least one arm");
  hyper.validate();
  arms_.reserve(arms);
  for (std::size_t k = 0; k < arms; ++k) arms_.emplace_back(dim);
}

Decision LinearTsPolicy::select(const ContextVector& context, RngStream& rng) const {
  return {cts_select(arms_, context, v_, rng), -1};
}

void LinearTsPolicy::update(const ContextVector& context, const Decision& decision,
                            int reward) {
  check_arm(decision.arm, arms_.size());
  arms_[decision.arm].update(context, reward);
}

TsccPolicy::TsccPolicy(std::size_t arms, std::size_t dim, const HyperParams& hyper)
    : state_(TsccState::fresh(arms, dim, hyper)) {}

Decision TsccPolicy::select(const ContextVector& context, RngStream& rng) const {
  const int alpha = tscc_select_policy(state_.meta, rng);
  return {tscc_select_arm(state_, context, alpha, rng), alpha};
}

void TsccPolicy::update(const ContextVector& context, const Decision& decision, int reward) {
  tscc_update(state_, context, decision.arm, decision.alpha, reward);
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, std::size_t arms, std::size_t dim,
                                    const HyperParams& hyper) {
  switch (kind) {
    case PolicyKind::kMab: return std::make_unique<BetaTsPolicy>(arms, hyper);
    case PolicyKind::kNsmab: return std::make_unique<SlidingWindowUcbPolicy>(arms, hyper);
    case PolicyKind::kCmab: return std::make_unique<LinearTsPolicy>(arms, dim, hyper);
    case PolicyKind::kTscc: return std::make_unique<TsccPolicy>(arms, dim, hyper);
  }
  throw InvalidParameter("unknown policy kind");
}

}  // namespace cbcc
