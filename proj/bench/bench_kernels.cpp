#include <random>

#include <benchmark/benchmark.h>

#include "lindlab/liouville.hpp"

using namespace lindlab;

namespace {

struct Problem {
  Superoperator liou;
  CVec x;
  CVec y;
};

Problem make(int n, bool assemble) {
  const auto b = build_basis(n, 0.0);
  LiouvillianOptions opts;
  opts.assemble_matrix = assemble;
  Problem p{build_liouvillian(build_xxz_hamiltonian(b, {1.0, 0.4, {}}), build_dephasing_jumps(b), 0.05, opts), {}, {}};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  p.x.resize(static_cast<Eigen::Index>(p.liou.dim()));
  for (auto& v : p.x) v = cplx{normal(rng), normal(rng)};
  p.y.resize(p.x.size());
  return p;
}

std::span<const cplx> in(const CVec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<cplx> out(CVec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void BM_SpmvSerial(benchmark::State& state) {
  auto p = make(static_cast<int>(state.range(0)), true);
  for (auto _ : state) {
    kernels::spmv_serial(p.liou.matrix, in(p.x), out(p.y));
    benchmark::DoNotOptimize(p.y.data());
  }
  state.SetItemsProcessed(state.iterations() * p.liou.matrix.nonZeros());
}

void BM_SpmvParallel(benchmark::State& state) {
  auto p = make(static_cast<int>(state.range(0)), true);
  for (auto _ : state) {
    kernels::spmv(p.liou.matrix, in(p.x), out(p.y));
    benchmark::DoNotOptimize(p.y.data());
  }
  state.SetItemsProcessed(state.iterations() * p.liou.matrix.nonZeros());
}

void BM_GeneratorSerial(benchmark::State& state) {
  auto p = make(static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    p.liou.generator->apply_serial(in(p.x), out(p.y));
    benchmark::DoNotOptimize(p.y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.liou.dim()));
}

void BM_GeneratorParallel(benchmark::State& state) {
  auto p = make(static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    p.liou.generator->apply(in(p.x), out(p.y));
    benchmark::DoNotOptimize(p.y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.liou.dim()));
}

}  // namespace

BENCHMARK(BM_SpmvSerial)->Arg(8)->Arg(10)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SpmvParallel)->Arg(8)->Arg(10)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GeneratorSerial)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GeneratorParallel)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
