#include <benchmark/benchmark.h>

#include "pointcert/specialfn.hpp"

using namespace pointcert;

namespace {

void BM_PhiInv(benchmark::State& state) {
    double p = 0.0001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phi_inv(p));
        p += 0.0001;
        if (p >= 1.0) p = 0.0001;
    }
}

void BM_Chi2Inv3(benchmark::State& state) {
    double p = 0.001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(chi2_inv(p, 3));
        p += 0.001;
        if (p >= 1.0) p = 0.001;
    }
}

void BM_ClopperPearson(benchmark::State& state) {
    std::int64_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(clopper_pearson_lower(900 + (k % 100), 1000, 1e-3));
        ++k;
    }
}

} // namespace

BENCHMARK(BM_PhiInv);
BENCHMARK(BM_Chi2Inv3);
BENCHMARK(BM_ClopperPearson);
