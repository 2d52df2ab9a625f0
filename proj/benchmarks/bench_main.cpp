#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include <hmgibbs/markov.hpp>
#include <hmgibbs/pushforward.hpp>

using namespace hmg;

namespace {

LocallyConstantPotential random_table(std::size_t k, std::size_t r, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t n = 1;
    for (std::size_t i = 0; i <= r; ++i) n *= k;
    std::vector<double> t(n);
    for (auto& x : t) x = u(g);
    return LocallyConstantPotential(Alphabet::digits(k), r, std::move(t));
}

AmalgamationMap merge(std::size_t k) {
    std::vector<Symbol> table(k, 1);
    table[0] = 0;
    return AmalgamationMap(Alphabet::digits(k), Alphabet::digits(2), table);
}

}  // namespace

// Certified eigendata of the A^r transfer matrix.
void BM_PerronData(benchmark::State& st) {
    const auto t = build_transfer(random_table(3, static_cast<std::size_t>(st.range(0)), 1));
    for (auto _ : st) benchmark::DoNotOptimize(perron_data(t.matrix));
    st.counters["states"] = static_cast<double>(t.matrix.rows());
}
BENCHMARK(BM_PerronData)->DenseRange(1, 6)->Unit(benchmark::kMicrosecond);

void BM_MeasureCylinder(benchmark::State& st) {
    const auto m = measure_from(random_table(3, 2, 2));
    const auto w = Word::from_rank(Alphabet::digits(3), 12345, static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(cylinder_log_prob(m, w));
}
BENCHMARK(BM_MeasureCylinder)->RangeMultiplier(4)->Range(4, 1024);

void BM_PushforwardBuild(benchmark::State& st) {
    const auto pot = random_table(3, static_cast<std::size_t>(st.range(0)), 3);
    const auto map = merge(3);
    for (auto _ : st) benchmark::DoNotOptimize(PushforwardMeasure(pot, map));
}
BENCHMARK(BM_PushforwardBuild)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_PushforwardCylinder(benchmark::State& st) {
    const PushforwardMeasure pf(random_table(3, 2, 4), merge(3));
    const auto b = Word::from_rank(Alphabet::digits(2), 0x5a5a5a5aULL, static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(pushforward_cylinder_log_prob(pf, b));
}
BENCHMARK(BM_PushforwardCylinder)->RangeMultiplier(4)->Range(4, 1024);

void BM_InducedExact(benchmark::State& st) {
    const PushforwardMeasure pf(random_table(3, 1, 5), merge(3));
    const std::size_t n = static_cast<std::size_t>(st.range(0));
    const auto b = Word::parse(Alphabet::digits(2), "0110100110010110").periodic_extension(n + 1);
    for (auto _ : st) benchmark::DoNotOptimize(induced_potential_exact_r(pf, b, n));
}
BENCHMARK(BM_InducedExact)->RangeMultiplier(4)->Range(8, 2048);

void BM_InducedGeneral(benchmark::State& st) {
    const auto psi = geometric_tail(Alphabet::digits(3), {0.02, -0.01, 0.0}, 0.1);
    const auto map = merge(3);
    const auto b = Word::parse(Alphabet::digits(2), "011");
    const double tol = std::pow(10.0, -static_cast<double>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(induced_potential_general(psi, map, b, tol));
}
BENCHMARK(BM_InducedGeneral)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_GibbsScan(benchmark::State& st) {
    const auto m = measure_from(random_table(3, 2, 6));
    for (auto _ : st) benchmark::DoNotOptimize(gibbs_inequality_check(m, static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_GibbsScan)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_VariationReport(benchmark::State& st) {
    const PushforwardMeasure pf(random_table(3, 1, 7), merge(3));
    for (auto _ : st) benchmark::DoNotOptimize(variation_report(pf, static_cast<std::size_t>(st.range(0)), 40));
}
BENCHMARK(BM_VariationReport)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
