// Serial reference vs OpenMP kernels on cubic grids.

#include <benchmark/benchmark.h>

#include <vector>

#include "ieppa/bcd.hpp"
#include "ieppa/constraints.hpp"
#include "ieppa/gen.hpp"
#include "ieppa/kernels.hpp"
#include "ieppa/tensor.hpp"

namespace {

using namespace ieppa;

Tensor3 Filled(Dims d) {
  Tensor3 t(d);
  SplitMix64 rng(7);
  for (double& v : t.values()) v = rng.Uniform();
  return t;
}

template <bool kParallel>
void BM_BlockSum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Dims d{n, n, n};
  const auto blocks = CmotMarginalBlocks(d);
  const Tensor3 x = Filled(d);
  std::vector<double> out(n);
  for (auto _ : state) {
    for (const auto& b : blocks) {
      if constexpr (kParallel) {
        kernels::parallel::BlockSum(b, x.values(), out);
      } else {
        kernels::serial::BlockSum(b, x.values(), out);
      }
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(3 * d.size()));
}

template <bool kParallel>
void BM_RowLogSumExp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Dims d{n, n, n};
  const auto blocks = CmotMarginalBlocks(d);
  const Tensor3 z = Filled(d);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::parallel::RowLogSumExp(blocks[2], z.values(), 0.05, out);
    } else {
      kernels::serial::RowLogSumExp(blocks[2], z.values(), 0.05, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.size()));
}

template <bool kParallel>
void BM_MarginalReduce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Dims d{n, n, n};
  const Tensor3 k = Filled(d);
  const std::vector<double> w(n, 0.5);
  std::vector<double> out(n);
  for (auto _ : state) {
    for (int axis = 0; axis < 3; ++axis) {
      if constexpr (kParallel) {
        kernels::parallel::MarginalReduce(d, axis, k.values(), w, w, out);
      } else {
        kernels::serial::MarginalReduce(d, axis, k.values(), w, w, out);
      }
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(3 * d.size()));
}

template <bool kParallel>
void BM_ExpScaled(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor3 z = Filled(Dims{n, n, n});
  Tensor3 out(z.dims());
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::parallel::ExpScaled(z.values(), 0.05, out.values());
    } else {
      kernels::serial::ExpScaled(z.values(), 0.05, out.values());
    }
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(z.size()));
}

// One full three-marginal sweep through the library (parallel kernels).
void BM_Cmot3Sweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  GenSpec spec;
  spec.marginal_count = 3;
  spec.n1 = spec.n2 = spec.n3 = n;
  const Instance inst = GenCmot(spec).instance;
  const ProxSubproblem sub = ProxSubproblem::FromCenter(inst, Tensor3::Ones(inst.dims), 0.05);
  DualState st = DualState::Cold(inst);
  for (auto _ : state) {
    Cmot3Sweep(sub, st);
    benchmark::DoNotOptimize(st.xi.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(inst.dims.size()));
}

}  // namespace

BENCHMARK(BM_BlockSum<false>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_BlockSum<true>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_RowLogSumExp<false>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_RowLogSumExp<true>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_MarginalReduce<false>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_MarginalReduce<true>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_ExpScaled<false>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_ExpScaled<true>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_Cmot3Sweep)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
