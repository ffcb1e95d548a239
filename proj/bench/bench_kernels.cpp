// Serial vs OpenMP kernels. Run with --benchmark_filter=... to narrow down.

#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "lbm/kernels.hpp"
#include "lbm/random.hpp"
#include "lbm/rbm.hpp"

using namespace lbm;
using kernels::Backend;

namespace {

Cnf random_3cnf(std::size_t n, std::size_t m, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    Cnf cnf;
    cnf.n_vars = n;
    std::vector<VarIndex> order(n);
    while (cnf.clauses.size() < m) {
        std::iota(order.begin(), order.end(), VarIndex{0});
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<VarIndex> pos, neg;
        for (int t = 0; t < 3; ++t) (bernoulli(rng, 0.5) ? pos : neg).push_back(order[t]);
        std::sort(pos.begin(), pos.end());
        std::sort(neg.begin(), neg.end());
        cnf.clauses.emplace_back(pos, neg);
    }
    return cnf;
}

Backend backend_of(const benchmark::State& state) { return state.range(1) ? Backend::openmp : Backend::serial; }

void BM_EnumerateEnergies(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Cnf cnf = random_3cnf(n, 4 * n, 1);
    const Rbm rbm = compile_cnf(cnf, {});
    const std::vector<std::uint8_t> base(n, 0);
    std::vector<VarIndex> all(n);
    std::iota(all.begin(), all.end(), VarIndex{0});
    const kernels::Completions comp{base, all};
    std::vector<double> e(comp.count()), f(comp.count());
    for (auto _ : state) {
        kernels::enumerate_energies(rbm, comp, 5.0, e, f, backend_of(state));
        benchmark::DoNotOptimize(f.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * comp.count()));
}

void BM_SatisfiedWeights(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Cnf cnf = random_3cnf(n, 4 * n, 2);
    const std::vector<std::uint8_t> base(n, 0);
    std::vector<VarIndex> all(n);
    std::iota(all.begin(), all.end(), VarIndex{0});
    const kernels::Completions comp{base, all};
    std::vector<double> s(comp.count());
    for (auto _ : state) {
        kernels::satisfied_weights(cnf, comp, s, backend_of(state));
        benchmark::DoNotOptimize(s.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * comp.count()));
}

void BM_BatchFreeEnergy(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const std::size_t nv = 64, nh = 256;
    Rng rng = make_rng(3);
    Rbm rbm(nv, nh);
    for (auto& w : rbm.W) w = uniform01(rng) - 0.5;
    std::vector<double> x(rows * nv), out(rows);
    for (auto& v : x) v = bernoulli(rng, 0.5);
    for (auto _ : state) {
        kernels::batch_free_energy(rbm, x, 1.0, out, backend_of(state));
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows));
}

void BM_CdStatistics(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const std::size_t nv = 64, nh = 256;
    Rng rng = make_rng(4);
    std::vector<double> v0(rows * nv), vk(rows * nv), ph0(rows * nh), phk(rows * nh);
    for (auto* buf : {&v0, &vk, &ph0, &phk})
        for (auto& v : *buf) v = uniform01(rng);
    std::vector<double> dW(nv * nh), da(nv), db(nh);
    for (auto _ : state) {
        kernels::cd_statistics(nv, nh, v0, ph0, vk, phk, dW, da, db, backend_of(state));
        benchmark::DoNotOptimize(dW.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows));
}

}  // namespace

BENCHMARK(BM_EnumerateEnergies)->ArgsProduct({{12, 16, 20}, {0, 1}})->ArgNames({"vars", "omp"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SatisfiedWeights)->ArgsProduct({{12, 16, 20}, {0, 1}})->ArgNames({"vars", "omp"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchFreeEnergy)->ArgsProduct({{64, 1024}, {0, 1}})->ArgNames({"rows", "omp"});
BENCHMARK(BM_CdStatistics)->ArgsProduct({{16, 256}, {0, 1}})->ArgNames({"rows", "omp"});

BENCHMARK_MAIN();
