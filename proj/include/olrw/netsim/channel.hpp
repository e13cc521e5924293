/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <vector>

#include "olrw/common/time.hpp"
#include "olrw/config/constants.hpp"
#include "olrw/phy/params.hpp"

namespace olrw::netsim {

/// Time on air for a payload: T_sym x (preamble + 4.25 + payload symbols).
double airtime(const phy::PhyParams& p, std::size_t payload_len);

/// Log-distance path loss. d <= 0 throws Range.
double path_loss_db(double d_m, const config::ChannelModel& m = config::constants().channel_model);
double received_power_dbm(double tx_dbm, double d_m, const config::ChannelModel& m = config::constants().channel_model);
double link_snr_db(double tx_dbm, double d_m, const phy::PhyParams& p,
                   const config::ChannelModel& m = config::constants().channel_model);

struct Reception {
    std::uint64_t id = 0;
    int sf = 7;
    double rx_dbm = 0;
    SimTime start = 0;
    SimTime end = 0;  ///< exclusive
};

/// Outcome of each reception against every overlapping one on the same channel at
/// one receiver. Survival needs wanted - interferer >= the capture threshold (same
/// sf) or the cross-sf rejection entry (different sf) for every overlapper.
std::vector<bool> collision_resolve(const std::vector<Reception>& rx,
                                    const config::ConstantsRegistry& c = config::constants());

/// Capture as seen at a receiver: `lead` samples of noise, then the frame at
/// rx_dbm, with complex AWGN at the noise floor over the whole buffer. Sample
/// units: unit power == 0 dBm.
phy::IQBuffer synthesize_capture(const phy::SymbolBlock& block, const phy::PhyParams& p, double rx_dbm,
                                 double noise_floor_dbm, std::size_t lead, std::uint64_t seed);

/// Same, for an already modulated waveform of unit amplitude.
phy::IQBuffer synthesize_capture(const std::vector<phy::Sample>& unit_waveform, double sample_rate_hz,
                                 double rx_dbm, double noise_floor_dbm, std::size_t lead, std::uint64_t seed);

}  // namespace olrw::netsim
