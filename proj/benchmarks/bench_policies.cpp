#include <benchmark/benchmark.h>

#include "cbcc/policy.hpp"

namespace {

cbcc::Vector sparse_context(Eigen::Index d, cbcc::RngStream& rng, double density) {
  cbcc::Vector c = cbcc::Vector::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (rng.uniform() < density) c(i) = 1.0;
  }
  return c;
}

// One select + update round on a K=9 problem of dimension range(0).
template <cbcc::PolicyKind Kind>
void BM_Round(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t kArms = 9;
  cbcc::HyperParams hyper;
  hyper.r_scale = 0.01;
  auto policy = cbcc::make_policy(Kind, kArms, d, hyper);
  cbcc::RngStream rng(11);
  cbcc::RngStream data_rng(12);
  std::vector<cbcc::Vector> contexts;
  for (int i = 0; i < 64; ++i) {
    contexts.push_back(sparse_context(static_cast<Eigen::Index>(d), data_rng, 0.05));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& c = contexts[i++ % contexts.size()];
    const auto decision = policy->select(c, rng);
    policy->update(c, decision, decision.arm == 0 ? 1 : 0);
  }
}
BENCHMARK_TEMPLATE(BM_Round, cbcc::PolicyKind::kMab)->Arg(857);
BENCHMARK_TEMPLATE(BM_Round, cbcc::PolicyKind::kNsmab)->Arg(857);
BENCHMARK_TEMPLATE(BM_Round, cbcc::PolicyKind::kCmab)->Arg(20)->Arg(100)->Arg(857);
BENCHMARK_TEMPLATE(BM_Round, cbcc::PolicyKind::kTscc)->Arg(20)->Arg(100)->Arg(857);

}  // namespace

BENCHMARK_MAIN();
