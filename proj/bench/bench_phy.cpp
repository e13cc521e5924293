/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <benchmark/benchmark.h>

#include "olrw/common/rng.hpp"
#include "olrw/phy/chirp.hpp"
#include "olrw/phy/kernels.hpp"

using namespace olrw;
using namespace olrw::phy;

namespace {

/// A noisy run of `count` random symbols at sf, one sample per chip.
std::vector<Sample> symbol_run(const PhyParams& p, std::size_t count)
{
    auto rng = make_rng(42, {static_cast<std::uint64_t>(p.sf)});
    std::vector<Sample> iq;
    iq.reserve(count * p.chips());
    for (std::size_t i = 0; i < count; ++i) {
        const auto sym = chirp_modulate(static_cast<std::uint32_t>(rng() % p.chips()), p).samples;
        iq.insert(iq.end(), sym.begin(), sym.end());
    }
    kernels::add_awgn(iq, -5.0, 7);
    return iq;
}

void BM_DemodFft(benchmark::State& st)
{
    const auto p = PhyParams::make(static_cast<int>(st.range(0)));
    const std::size_t n = 64;
    const auto iq = symbol_run(p, n);
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::demodulate_symbols(iq, 0, n, p));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * n));
}

void BM_DemodDftSerial(benchmark::State& st)
{
    const auto p = PhyParams::make(static_cast<int>(st.range(0)));
    const std::size_t n = 8;
    const auto iq = symbol_run(p, n);
    for (auto _ : st)
        benchmark::DoNotOptimize(reference::demodulate_symbols_dft(iq, 0, n, p));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * n));
}

void BM_SymbolTrialsOmp(benchmark::State& st)
{
    const auto p = PhyParams::make(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::symbol_trials(p, -10.0, 256, 1));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * 256));
}

void BM_SymbolTrialsSerial(benchmark::State& st)
{
    const auto p = PhyParams::make(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(reference::symbol_trials_serial(p, -10.0, 256, 1));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * 256));
}

void BM_Awgn(benchmark::State& st)
{
    std::vector<Sample> iq(static_cast<std::size_t>(st.range(0)), Sample{1.0f, 0.0f});
    std::uint64_t seed = 0;
    for (auto _ : st) {
        kernels::add_awgn(iq, 0.0, ++seed);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations()) * st.range(0));
}

}  // namespace

BENCHMARK(BM_DemodFft)->DenseRange(7, 12, 1);
BENCHMARK(BM_DemodDftSerial)->DenseRange(7, 10, 1);
BENCHMARK(BM_SymbolTrialsOmp)->Arg(7)->Arg(9)->Arg(12);
BENCHMARK(BM_SymbolTrialsSerial)->Arg(7)->Arg(9)->Arg(12);
BENCHMARK(BM_Awgn)->Arg(1 << 14)->Arg(1 << 18);

BENCHMARK_MAIN();
