/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/phy/chirp.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

#include "fft.hpp"
#include "olrw/common/error.hpp"

namespace olrw::phy {
namespace {

// Phase of sample n of symbol s in units of 2*pi/(2N), reduced exactly in integers.
Sample chirp_sample(std::uint64_t n, std::uint64_t s, std::uint64_t N)
{
    const std::uint64_t num = (2 * ((n * s) % N) + (n * n) % (2 * N)) % (2 * N);
    const double phase = std::numbers::pi * static_cast<double>(num) / static_cast<double>(N);
    return {static_cast<float>(std::cos(phase)), static_cast<float>(std::sin(phase))};
}

struct ChirpTables {
    std::array<std::vector<Sample>, 13> up;
    std::array<std::vector<Sample>, 13> conj_up;
    std::array<std::once_flag, 13> once;
};

ChirpTables& tables()
{
    static ChirpTables t;
    return t;
}

void ensure(int sf)
{
    auto& t = tables();
    std::call_once(t.once[static_cast<std::size_t>(sf)], [&] {
        const std::uint64_t N = 1ull << sf;
        auto& up = t.up[static_cast<std::size_t>(sf)];
        auto& cj = t.conj_up[static_cast<std::size_t>(sf)];
        up.resize(N);
        cj.resize(N);
        for (std::uint64_t n = 0; n < N; ++n) {
            up[n] = chirp_sample(n, 0, N);
            cj[n] = std::conj(up[n]);
        }
    });
}

const std::vector<Sample>& conj_upchirp(int sf)
{
    ensure(sf);
    return tables().conj_up[static_cast<std::size_t>(sf)];
}

void check_sf(int sf)
{
    if (sf < 7 || sf > 12)
        raise(ErrorKind::Range, "sf " + std::to_string(sf) + " outside 7..12");
}

}  // namespace

const std::vector<Sample>& base_upchirp(int sf)
{
    check_sf(sf);
    ensure(sf);
    return tables().up[static_cast<std::size_t>(sf)];
}

IQBuffer chirp_modulate(std::uint32_t symbol, const PhyParams& p)
{
    p.validate();
    const std::uint64_t N = p.chips();
    if (symbol >= N)
        raise(ErrorKind::Range, "symbol " + std::to_string(symbol) + " >= 2^sf");
    IQBuffer out;
    out.sample_rate_hz = p.bw_hz;
    out.samples.resize(N);
    for (std::uint64_t n = 0; n < N; ++n)
        out.samples[n] = chirp_sample(n, symbol, N);
    return out;
}

namespace detail {

void dechirped_power(std::span<const Sample> window, std::span<const Sample> reference, std::vector<float>& power)
{
    const std::size_t N = window.size();
    std::vector<Sample> prod(N), spec(N);
    for (std::size_t n = 0; n < N; ++n)
        prod[n] = window[n] * reference[n];
    fft_forward(prod.data(), spec.data(), N);
    power.resize(N);
    for (std::size_t k = 0; k < N; ++k)
        power[k] = std::norm(spec[k]);
}

void dechirped_magnitude(std::span<const Sample> window, const std::vector<Sample>& conj_ref, std::vector<float>& mag)
{
    dechirped_power(window, conj_ref, mag);
    for (auto& m : mag)
        m = std::sqrt(m);
}

DemodResult pick_peak(const std::vector<float>& mag)
{
    const std::size_t N = mag.size();
    std::size_t best = 0;
    double total = 0;
    for (std::size_t k = 0; k < N; ++k) {
        total += mag[k];
        if (mag[k] > mag[best])
            best = k;
    }
    DemodResult r;
    r.symbol = static_cast<std::uint16_t>(best);
    const double off = (total - mag[best]) / static_cast<double>(N - 1);
    if (off > 0)
        r.peak_metric = static_cast<float>(mag[best] / off);
    else
        r.peak_metric = mag[best] > 0 ? 1e9f : 1.0f;
    return r;
}

}  // namespace detail

DemodResult chirp_demodulate(std::span<const Sample> iq, const PhyParams& p)
{
    p.validate();
    if (iq.size() != p.chips())
        raise(ErrorKind::Shape, "demodulation window of " + std::to_string(iq.size()) + " samples, expected " +
                                    std::to_string(p.chips()));
    std::vector<float> mag;
    detail::dechirped_magnitude(iq, conj_upchirp(p.sf), mag);
    return detail::pick_peak(mag);
}

DemodResult chirp_demodulate(const IQBuffer& iq, const PhyParams& p)
{
    return chirp_demodulate(std::span<const Sample>(iq.samples), p);
}

std::size_t frame_samples(std::size_t data_symbols, const PhyParams& p)
{
    const std::size_t N = p.chips();
    return (static_cast<std::size_t>(p.preamble_len) + 4 + data_symbols) * N + N / 4;
}

IQBuffer modulate_frame(const SymbolBlock& block, const PhyParams& p)
{
    p.validate();
    const std::size_t N = p.chips();
    const auto& up = base_upchirp(p.sf);
    PhyParams pp = p;
    pp.preamble_len = block.preamble_len;
    pp.validate();

    IQBuffer out;
    out.sample_rate_hz = p.bw_hz;
    out.samples.reserve(frame_samples(block.symbols.size(), pp));
    auto append_symbol = [&](std::uint32_t s) {
        if (s >= N)
            raise(ErrorKind::Range, "symbol " + std::to_string(s) + " >= 2^sf");
        if (s == 0) {
            out.samples.insert(out.samples.end(), up.begin(), up.end());
            return;
        }
        auto c = chirp_modulate(s, p);
        out.samples.insert(out.samples.end(), c.samples.begin(), c.samples.end());
    };
    for (int i = 0; i < block.preamble_len; ++i)
        append_symbol(0);
    append_symbol(kSyncSymbol1);
    append_symbol(kSyncSymbol2);
    const auto& down = conj_upchirp(p.sf);
    out.samples.insert(out.samples.end(), down.begin(), down.end());
    out.samples.insert(out.samples.end(), down.begin(), down.end());
    out.samples.insert(out.samples.end(), down.begin(), down.begin() + static_cast<std::ptrdiff_t>(N / 4));
    for (auto s : block.symbols)
        append_symbol(s);
    return out;
}

}  // namespace olrw::phy
