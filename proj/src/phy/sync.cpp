/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/phy/sync.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "olrw/common/error.hpp"
#include "olrw/phy/kernels.hpp"

namespace olrw::phy {
namespace {

// Peak-to-mean power ratios. A sum of four noise-only windows exceeds 7 in a given
// bin with probability ~1e-8, so false alarms over a capture are negligible.
constexpr double kDetectRatio = 7.0;
constexpr double kSfdRatio = 7.0;
constexpr double kPreambleWindowRatio = 4.0;

struct Peak {
    std::size_t bin = 0;
    double ratio = 0;
};

Peak peak_of(const std::vector<float>& power)
{
    Peak pk;
    double total = 0;
    for (std::size_t k = 0; k < power.size(); ++k) {
        total += power[k];
        if (power[k] > power[pk.bin])
            pk.bin = k;
    }
    const double rest = (total - power[pk.bin]) / static_cast<double>(power.size() - 1);
    pk.ratio = rest > 0 ? power[pk.bin] / rest : (power[pk.bin] > 0 ? 1e9 : 1.0);
    return pk;
}

double ratio_at(const std::vector<float>& power, std::size_t bin)
{
    double total = 0;
    for (auto v : power)
        total += v;
    const double rest = (total - power[bin]) / static_cast<double>(power.size() - 1);
    return rest > 0 ? power[bin] / rest : 0.0;
}

class Spectra {
public:
    Spectra(std::span<const Sample> iq, int sf)
        : iq_(iq), N_(std::size_t{1} << sf), up_(base_upchirp(sf)), conj_up_(N_)
    {
        for (std::size_t n = 0; n < N_; ++n)
            conj_up_[n] = std::conj(up_[n]);
    }

    bool fits(std::int64_t start) const
    {
        return start >= 0 && static_cast<std::size_t>(start) + N_ <= iq_.size();
    }

    /// Upchirp-dechirped power of the window at `start`.
    std::vector<float> up(std::int64_t start) const { return power(start, conj_up_); }
    /// Downchirp-dechirped power (multiplied by the upchirp).
    std::vector<float> down(std::int64_t start) const { return power(start, up_); }

private:
    std::vector<float> power(std::int64_t start, std::span<const Sample> ref) const
    {
        std::vector<float> out;
        detail::dechirped_power(iq_.subspan(static_cast<std::size_t>(start), N_), ref, out);
        return out;
    }

    std::span<const Sample> iq_;
    std::size_t N_;
    const std::vector<Sample>& up_;
    std::vector<Sample> conj_up_;
};

std::int64_t mod(std::int64_t a, std::int64_t n) { return ((a % n) + n) % n; }

}  // namespace

PreambleDetection preamble_detect(std::span<const Sample> iq, const PhyParams& p, std::size_t search_limit)
{
    p.validate();
    PreambleDetection det;
    const std::int64_t N = p.chips();
    const std::size_t L = iq.size();
    if (L < 2 * static_cast<std::size_t>(N))
        return det;

    Spectra spec(iq, p.sf);
    const std::size_t nwin = L / static_cast<std::size_t>(N);
    const std::size_t K = static_cast<std::size_t>(std::clamp(p.preamble_len - 1, 1, 4));

    // Coarse search: K consecutive windows summed, so a preamble tone stands out of
    // the noise while data symbols (varying bins) do not.
    std::vector<std::vector<float>> cache(nwin);
    auto window_up = [&](std::size_t w) -> const std::vector<float>& {
        if (cache[w].empty())
            cache[w] = spec.up(static_cast<std::int64_t>(w) * N);
        return cache[w];
    };
    std::optional<std::size_t> hit_w;
    std::size_t k_up = 0;
    for (std::size_t w = 0; w + K <= nwin && w * static_cast<std::size_t>(N) < search_limit; ++w) {
        std::vector<float> sum(window_up(w));
        for (std::size_t i = 1; i < K; ++i) {
            const auto& pw = window_up(w + i);
            for (std::size_t k = 0; k < sum.size(); ++k)
                sum[k] += pw[k];
        }
        const Peak pk = peak_of(sum);
        if (pk.ratio >= kDetectRatio) {
            hit_w = w;
            k_up = pk.bin;
            break;
        }
    }
    if (!hit_w)
        return det;
    det.found = true;

    // Grid of windows that are symbol-aligned up to the (still unknown) carrier
    // offset: G_j = w*N - k_up + j*N sits f samples before a true symbol boundary.
    const std::int64_t g0 = static_cast<std::int64_t>(*hit_w) * N - static_cast<std::int64_t>(k_up);
    auto grid = [&](std::int64_t j) { return g0 + j * N; };

    // Downchirp search: two-window sums so a 2.25-symbol SFD always contributes at
    // least one clean window whatever the residual misalignment.
    double best_ratio = 0;
    std::int64_t best_j = 0;
    std::size_t k_down = 0;
    for (std::int64_t j = 1; j <= p.preamble_len + 6; ++j) {
        if (!spec.fits(grid(j)) || !spec.fits(grid(j + 1)))
            break;
        std::vector<float> sum = spec.down(grid(j));
        const auto next = spec.down(grid(j + 1));
        for (std::size_t k = 0; k < sum.size(); ++k)
            sum[k] += next[k];
        const Peak pk = peak_of(sum);
        if (pk.ratio > best_ratio) {
            best_ratio = pk.ratio;
            best_j = j;
            k_down = pk.bin;
        }
    }

    if (best_ratio >= kSfdRatio) {
        // Upchirp tone sits at delta+f, downchirp tone at f-delta; on this grid
        // delta = -f, so the downchirp bin is 2f mod N. CFO is taken in [-N/4, N/4).
        std::int64_t f = static_cast<std::int64_t>(k_down) / 2;
        if (f >= N / 4)
            f -= N / 2;
        // The SFD begins on the boundary at grid + f; pick the neighbouring boundary
        // whose two preceding windows carry the sync symbols.
        double best_score = -1;
        std::int64_t sfd = 0;
        for (std::int64_t m = -1; m <= 1; ++m) {
            const std::int64_t s = grid(best_j) + f + m * N;
            if (!spec.fits(s - 2 * N) || !spec.fits(s - N))
                continue;
            const double score =
                ratio_at(spec.up(s - 2 * N), static_cast<std::size_t>(mod(kSyncSymbol1 + f, N))) +
                ratio_at(spec.up(s - N), static_cast<std::size_t>(mod(kSyncSymbol2 + f, N)));
            if (score > best_score) {
                best_score = score;
                sfd = s;
            }
        }
        if (best_score >= 0) {
            det.sfd_found = true;
            det.cfo_bins = static_cast<int>(f);
            det.data_start = sfd + 2 * N + N / 4;
            det.offset = sfd - static_cast<std::int64_t>(p.preamble_len + 2) * N;
            return det;
        }
    }

    // No SFD in the capture: assume zero carrier offset, so the grid is the symbol
    // grid; walk back over preamble windows to the first one.
    std::int64_t j = 0;
    if (!spec.fits(grid(j)))
        ++j;
    while (spec.fits(grid(j - 1))) {
        const Peak pk = peak_of(spec.up(grid(j - 1)));
        const bool at_zero = pk.bin == 0 || pk.bin == 1 || pk.bin == static_cast<std::size_t>(N - 1);
        if (!at_zero || pk.ratio < kPreambleWindowRatio)
            break;
        --j;
    }
    det.offset = grid(j);
    det.cfo_bins = 0;
    return det;
}

PreambleDetection preamble_detect(const IQBuffer& iq, const PhyParams& p)
{
    return preamble_detect(std::span<const Sample>(iq.samples), p);
}

double noise_floor_dbm(std::uint32_t bw_hz, double noise_figure_db)
{
    return -174.0 + 10.0 * std::log10(static_cast<double>(bw_hz)) + noise_figure_db;
}

LinkMetrics estimate_link_metrics(std::span<const Sample> iq, double noise_floor, double reference_dbm)
{
    if (iq.empty())
        raise(ErrorKind::Shape, "link metrics need a non-empty buffer");
    double acc = 0;
    for (const auto& s : iq)
        acc += std::norm(std::complex<double>(s.real(), s.imag()));
    const double mean = acc / static_cast<double>(iq.size());
    LinkMetrics m;
    m.rssi_dbm = mean > 0 ? reference_dbm + 10.0 * std::log10(mean) : -300.0;
    m.snr_db = m.rssi_dbm - noise_floor;
    return m;
}

LinkMetrics estimate_link_metrics(const IQBuffer& iq, double noise_floor, double reference_dbm)
{
    return estimate_link_metrics(std::span<const Sample>(iq.samples), noise_floor, reference_dbm);
}

FrameCapture receive_frame(std::span<const Sample> iq, const PhyParams& p, std::size_t search_limit)
{
    FrameCapture cap;
    cap.detection = preamble_detect(iq, p, search_limit);
    if (!cap.detection.sfd_found || cap.detection.data_start < 0)
        return cap;
    const std::size_t start = static_cast<std::size_t>(cap.detection.data_start);
    if (start >= iq.size())
        return cap;
    const std::size_t count = (iq.size() - start) / p.chips();
    cap.symbols = kernels::demodulate_symbols(iq, start, count, p, cap.detection.cfo_bins);
    return cap;
}

}  // namespace olrw::phy
