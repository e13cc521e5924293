/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/netsim/channel.hpp"

#include <cmath>

#include "olrw/common/error.hpp"
#include "olrw/phy/chain.hpp"
#include "olrw/phy/chirp.hpp"
#include "olrw/phy/kernels.hpp"
#include "olrw/phy/sync.hpp"

namespace olrw::netsim {

double airtime(const phy::PhyParams& p, std::size_t payload_len)
{
    if (payload_len > phy::kMaxPayload)
        raise(ErrorKind::Range, "payload of " + std::to_string(payload_len) + " octets exceeds 255");
    return phy::airtime_s(p, payload_len);
}

double path_loss_db(double d_m, const config::ChannelModel& m)
{
    if (!(d_m > 0))
        raise(ErrorKind::Range, "distance must be positive, got " + std::to_string(d_m) + " m");
    return m.reference_loss_db + 10.0 * m.path_loss_exponent * std::log10(d_m / m.reference_distance_m);
}

double received_power_dbm(double tx_dbm, double d_m, const config::ChannelModel& m)
{
    return tx_dbm - path_loss_db(d_m, m);
}

double link_snr_db(double tx_dbm, double d_m, const phy::PhyParams& p, const config::ChannelModel& m)
{
    return received_power_dbm(tx_dbm, d_m, m) - phy::noise_floor_dbm(p.bw_hz, m.noise_figure_db);
}

std::vector<bool> collision_resolve(const std::vector<Reception>& rx, const config::ConstantsRegistry& c)
{
    std::vector<bool> ok(rx.size(), true);
    for (std::size_t w = 0; w < rx.size(); ++w) {
        for (std::size_t i = 0; i < rx.size(); ++i) {
            if (i == w || rx[i].end <= rx[w].start || rx[w].end <= rx[i].start)
                continue;
            const double need = rx[w].sf == rx[i].sf ? c.capture_threshold_db
                                                     : c.cross_sf_rejection_db[rx[w].sf][rx[i].sf];
            if (rx[w].rx_dbm - rx[i].rx_dbm < need) {
                ok[w] = false;
                break;
            }
        }
    }
    return ok;
}

phy::IQBuffer synthesize_capture(const std::vector<phy::Sample>& unit_waveform, double sample_rate_hz,
                                 double rx_dbm, double noise_floor_dbm, std::size_t lead, std::uint64_t seed)
{
    phy::IQBuffer out;
    out.sample_rate_hz = sample_rate_hz;
    out.samples.assign(lead, phy::Sample{});
    out.samples.insert(out.samples.end(), unit_waveform.begin(), unit_waveform.end());
    phy::kernels::add_awgn(out.samples, rx_dbm - noise_floor_dbm, seed);
    const float amp = static_cast<float>(std::pow(10.0, rx_dbm / 20.0));
    for (auto& s : out.samples)
        s *= amp;
    return out;
}

phy::IQBuffer synthesize_capture(const phy::SymbolBlock& block, const phy::PhyParams& p, double rx_dbm,
                                 double noise_floor_dbm, std::size_t lead, std::uint64_t seed)
{
    const auto wave = phy::modulate_frame(block, p);
    return synthesize_capture(wave.samples, wave.sample_rate_hz, rx_dbm, noise_floor_dbm, lead, seed);
}

}  // namespace olrw::netsim
