#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "cbcc/bandit.hpp"

namespace cbcc {

enum class PolicyKind { kMab, kNsmab, kCmab, kTscc };

// "mab", "nsmab", "cmab", "tscc". Throws InvalidParameter otherwise.
PolicyKind parse_policy_kind(std::string_view name);
std::string_view to_string(PolicyKind kind);

struct Decision {
  ArmIndex arm = 0;
  int alpha = -1;  // meta-policy flag; -1 for policies without one
};

// Uniform select/update interface. A policy instance is owned by a single
// experiment run and is not thread-safe.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual PolicyKind kind() const noexcept = 0;
  std::string_view name() const { return to_string(kind()); }

  virtual std::size_t arms() const noexcept = 0;

  virtual Decision select(const ContextVector& context, RngStream& rng) const = 0;
  virtual void update(const ContextVector& context, const Decision& decision, int reward) = 0;
};

// Beta-Bernoulli Thompson Sampling; ignores the context.
class BetaTsPolicy final : public Policy {
 public:
  BetaTsPolicy(std::size_t arms, const HyperParams& hyper);

  PolicyKind kind() const noexcept override { return PolicyKind::kMab; }
  std::size_t arms() const noexcept override { return arms_.size(); }
  Decision select(const ContextVector& context, RngStream& rng) const override;
  void update(const ContextVector& context, const Decision& decision, int reward) override;

  const std::vector<BetaArmState>& state() const noexcept { return arms_; }

 private:
  std::vector<BetaArmState> arms_;
};

// Sliding-window UCB; ignores the context and draws nothing from the rng.
class SlidingWindowUcbPolicy final : public Policy {
 public:
  SlidingWindowUcbPolicy(std::size_t arms, const HyperParams& hyper);

  PolicyKind kind() const noexcept override { return PolicyKind::kNsmab; }
  std::size_t arms() const noexcept override { return state_.arms(); }
  Decision select(const ContextVector& context, RngStream& rng) const override;
  void update(const ContextVector& context, const Decision& decision, int reward) override;

  const SlidingWindowState& state() const noexcept { return state_; }

 private:
  SlidingWindowState state_;
};

// Linear contextual Thompson Sampling.
class LinearTsPolicy final : public Policy {
 public:
  LinearTsPolicy(std::size_t arms, std::size_t dim, const HyperParams& hyper);

  PolicyKind kind() const noexcept override { return PolicyKind::kCmab; }
  std::size_t arms() const noexcept override { return arms_.size(); }
  Decision select(const ContextVector& context, RngStream& rng) const override;
  void update(const ContextVector& context, const Decision& decision, int reward) override;

  const std::vector<LinearArmState>& state() const noexcept { return arms_; }
  double v() const noexcept { return v_; }

 private:
  std::vector<LinearArmState> arms_;
  double v_;
};

class TsccPolicy final : public Policy {
 public:
  TsccPolicy(std::size_t arms, std::size_t dim, const HyperParams& hyper);

  PolicyKind kind() const noexcept override { return PolicyKind::kTscc; }
  std::size_t arms() const noexcept override { return state_.arms(); }
  Decision select(const ContextVector& context, RngStream& rng) const override;
  void update(const ContextVector& context, const Decision& decision, int reward) override;

  const TsccState& state() const noexcept { return state_; }

 private:
  TsccState state_;
};

std::unique_ptr<Policy> make_policy(PolicyKind kind, std::size_t arms, std::size_t dim,
                                    const HyperParams& hyper);

}  // namespace cbcc
