#include <benchmark/benchmark.h>

#include "cbcc/numerics.hpp"

namespace {

cbcc::Vector sparse_context(Eigen::Index d, cbcc::RngStream& rng, double density) {
  cbcc::Vector c = cbcc::Vector::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (rng.uniform() < density) c(i) = 1.0;
  }
  return c;
}

void BM_ShermanMorrison(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  cbcc::RngStream rng(1);
  cbcc::Matrix b_inv = cbcc::Matrix::Identity(d, d);
  const cbcc::Vector c = sparse_context(d, rng, 0.05);
  for (auto _ : state) {
    cbcc::sherman_morrison_update_in_place(b_inv, c * 1e-3);
    benchmark::DoNotOptimize(b_inv.data());
  }
}
BENCHMARK(BM_ShermanMorrison)->Arg(20)->Arg(100)->Arg(857);

void BM_CholeskyRankOne(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  cbcc::RngStream rng(2);
  auto factor = cbcc::CholeskyFactor::identity(d);
  const cbcc::Vector c = sparse_context(static_cast<Eigen::Index>(d), rng, 0.05);
  for (auto _ : state) {
    factor.rank_one_update(c * 1e-3);
    benchmark::DoNotOptimize(factor.lower().data());
  }
}
BENCHMARK(BM_CholeskyRankOne)->Arg(20)->Arg(100)->Arg(857);

void BM_Cholesky(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  cbcc::Matrix a = cbcc::Matrix::Random(d, d);
  const cbcc::SpdMatrix spd(a * a.transpose() + cbcc::Matrix::Identity(d, d) * static_cast<double>(d));
  for (auto _ : state) {
    auto f = cbcc::cholesky(spd);
    benchmark::DoNotOptimize(f.lower().data());
  }
}
BENCHMARK(BM_Cholesky)->Arg(20)->Arg(100)->Arg(857);

void BM_SampleMvnPrecision(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto factor = cbcc::CholeskyFactor::identity(d);
  const cbcc::Vector mean = cbcc::Vector::Zero(static_cast<Eigen::Index>(d));
  cbcc::RngStream rng(3);
  for (auto _ : state) {
    auto x = cbcc::sample_mvn_precision(mean, 1.0, factor, rng);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_SampleMvnPrecision)->Arg(20)->Arg(100)->Arg(857);

void BM_StandardNormal(benchmark::State& state) {
  cbcc::RngStream rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(cbcc::sample_standard_normal(rng));
}
BENCHMARK(BM_StandardNormal);

void BM_Beta(benchmark::State& state) {
  cbcc::RngStream rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(cbcc::sample_beta(3.0, 7.0, rng));
}
BENCHMARK(BM_Beta);

}  // namespace

BENCHMARK_MAIN();
