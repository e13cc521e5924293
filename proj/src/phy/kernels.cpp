/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/phy/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "olrw/common/error.hpp"
#include "olrw/common/rng.hpp"

namespace olrw::phy {
namespace {

void check_span(std::span<const Sample> iq, std::size_t start, std::size_t count, std::size_t N)
{
    if (start > iq.size() || count > (iq.size() - start) / N)
        raise(ErrorKind::Shape, "symbol windows run past the end of the buffer");
}

std::uint16_t remove_cfo(std::uint16_t bin, int cfo_bins, std::size_t N)
{
    const auto n = static_cast<std::int64_t>(N);
    return static_cast<std::uint16_t>(((static_cast<std::int64_t>(bin) - cfo_bins) % n + n) % n);
}

std::vector<Sample> conj_chirp(int sf)
{
    std::vector<Sample> c(base_upchirp(sf));
    for (auto& x : c)
        x = std::conj(x);
    return c;
}

// Single Monte-Carlo trial shared by the parallel and serial drivers.
bool run_trial(const PhyParams& p, const std::vector<Sample>& conj_ref, double snr_db, std::uint64_t seed,
               std::size_t t)
{
    const std::size_t N = p.chips();
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(t)});
    const auto s = static_cast<std::uint32_t>(rng() % N);
    auto iq = chirp_modulate(s, p).samples;
    const double sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0) / 2.0);
    std::normal_distribution<double> g(0.0, sigma);
    for (auto& x : iq) {
        const double re = g(rng);
        const double im = g(rng);
        x += Sample(static_cast<float>(re), static_cast<float>(im));
    }
    std::vector<float> mag;
    detail::dechirped_magnitude(iq, conj_ref, mag);
    return detail::pick_peak(mag).symbol == s;
}

}  // namespace

namespace kernels {

std::vector<DemodResult> demodulate_symbols(std::span<const Sample> iq, std::size_t start, std::size_t count,
                                            const PhyParams& p, int cfo_bins)
{
    p.validate();
    const std::size_t N = p.chips();
    check_span(iq, start, count, N);
    const std::vector<Sample> ref = conj_chirp(p.sf);
    std::vector<DemodResult> out(count);
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static) if (count * N >= 65536)
    for (std::int64_t i = 0; i < n; ++i) {
        std::vector<float> mag;
        detail::dechirped_magnitude(iq.subspan(start + static_cast<std::size_t>(i) * N, N), ref, mag);
        DemodResult r = detail::pick_peak(mag);
        r.symbol = remove_cfo(r.symbol, cfo_bins, N);
        out[static_cast<std::size_t>(i)] = r;
    }
    return out;
}

void add_awgn(std::span<Sample> iq, double snr_db, std::uint64_t seed)
{
    Rng rng(seed);
    const double sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0) / 2.0);
    std::normal_distribution<double> g(0.0, sigma);
    for (auto& x : iq) {
        const double re = g(rng);
        const double im = g(rng);
        x += Sample(static_cast<float>(re), static_cast<float>(im));
    }
}

SymbolTrialStats symbol_trials(const PhyParams& p, double snr_db, std::size_t trials, std::uint64_t seed)
{
    p.validate();
    const std::vector<Sample> ref = conj_chirp(p.sf);
    std::size_t correct = 0;
    const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(static) reduction(+ : correct)
    for (std::int64_t t = 0; t < n; ++t)
        correct += run_trial(p, ref, snr_db, seed, static_cast<std::size_t>(t)) ? 1 : 0;
    return {trials, correct};
}

double recovery_threshold_db(const PhyParams& p, std::span<const double> snr_grid_db, double target,
                             std::size_t trials, std::uint64_t seed)
{
    for (double snr : snr_grid_db)
        if (symbol_trials(p, snr, trials, seed).success_rate() >= target)
            return snr;
    return std::numeric_limits<double>::infinity();
}

}  // namespace kernels

namespace reference {

std::vector<DemodResult> demodulate_symbols_dft(std::span<const Sample> iq, std::size_t start, std::size_t count,
                                                const PhyParams& p, int cfo_bins)
{
    p.validate();
    const std::size_t N = p.chips();
    check_span(iq, start, count, N);
    const std::vector<Sample> ref = conj_chirp(p.sf);
    // Twiddles e^{-j 2 pi m / N} indexed by (k*n) mod N.
    std::vector<std::complex<double>> tw(N);
    for (std::size_t m = 0; m < N; ++m) {
        const double a = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(N);
        tw[m] = {std::cos(a), std::sin(a)};
    }
    std::vector<DemodResult> out;
    out.reserve(count);
    std::vector<std::complex<double>> x(N);
    std::vector<float> mag(N);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t n = 0; n < N; ++n) {
            const Sample v = iq[start + i * N + n] * ref[n];
            x[n] = {v.real(), v.imag()};
        }
        for (std::size_t k = 0; k < N; ++k) {
            std::complex<double> acc = 0;
            for (std::size_t n = 0; n < N; ++n)
                acc += x[n] * tw[(k * n) % N];
            mag[k] = static_cast<float>(std::abs(acc));
        }
        DemodResult r = detail::pick_peak(mag);
        r.symbol = remove_cfo(r.symbol, cfo_bins, N);
        out.push_back(r);
    }
    return out;
}

kernels::SymbolTrialStats symbol_trials_serial(const PhyParams& p, double snr_db, std::size_t trials,
                                               std::uint64_t seed)
{
    p.validate();
    const std::vector<Sample> ref = conj_chirp(p.sf);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < trials; ++t)
        correct += run_trial(p, ref, snr_db, seed, t) ? 1 : 0;
    return {trials, correct};
}

}  // namespace reference
}  // namespace olrw::phy
