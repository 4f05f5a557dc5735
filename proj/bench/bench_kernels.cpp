// Parallel kernels against the serial reference on the same inputs.

#include "snmf/data.hpp"
#include "snmf/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace snmf;

namespace {

struct Fixture {
    FactorModel model;
    Dataset data;
};

Fixture make_fixture(Index instances, Mode mode) {
    Scenario sc;
    sc.attributes = 20;
    sc.components = 4;
    sc.instances = instances;
    sc.seed = 7;
    auto bundle = generate_synthetic(sc);
    Fixture f{bundle.truth, bundle.data.dataset};
    f.data.mode = mode;
    f.data = mask_random(f.data, 0.1, 3);
    return f;
}

void BM_ExpectedCounts(benchmark::State& state) {
    const auto f = make_fixture(state.range(0), state.range(1) ? Mode::Integer : Mode::RealLimit);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::expected_counts(f.model.atoms.theta, f.model.activations, f.data));
    }
    state.SetItemsProcessed(state.iterations() * f.data.mask.count());
}

void BM_ExpectedCountsSerial(benchmark::State& state) {
    const auto f = make_fixture(state.range(0), state.range(1) ? Mode::Integer : Mode::RealLimit);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::serial::expected_counts(f.model.atoms.theta, f.model.activations, f.data));
    }
    state.SetItemsProcessed(state.iterations() * f.data.mask.count());
}

void BM_DataFit(benchmark::State& state) {
    const auto f = make_fixture(state.range(0), state.range(1) ? Mode::Integer : Mode::RealLimit);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::data_fit(f.model.atoms.theta, f.model.activations, f.data));
    }
    state.SetItemsProcessed(state.iterations() * f.data.mask.count());
}

void BM_DataFitSerial(benchmark::State& state) {
    const auto f = make_fixture(state.range(0), state.range(1) ? Mode::Integer : Mode::RealLimit);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::serial::data_fit(f.model.atoms.theta, f.model.activations, f.data));
    }
    state.SetItemsProcessed(state.iterations() * f.data.mask.count());
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int mode : {0, 1}) {
        for (int j : {500, 5000}) {
            b->Args({j, mode});
        }
    }
    b->ArgNames({"J", "integer"});
}

} // namespace

BENCHMARK(BM_ExpectedCounts)->Apply(sizes);
BENCHMARK(BM_ExpectedCountsSerial)->Apply(sizes);
BENCHMARK(BM_DataFit)->Apply(sizes);
BENCHMARK(BM_DataFitSerial)->Apply(sizes);

BENCHMARK_MAIN();
