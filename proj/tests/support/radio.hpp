/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "olrw/mac/frame.hpp"
#include "olrw/netsim/channel.hpp"
#include "olrw/phy/chain.hpp"
#include "olrw/phy/sync.hpp"
#include "olrw/ru/ru.hpp"

namespace olrw::testing {

inline mac::DeviceSession test_session(std::uint32_t addr = 0x26011BDA)
{
    mac::DeviceSession s;
    s.dev_addr = addr;
    s.nwk_skey = mac::key_from_hex("2b7e151628aed2a6abf7158809cf4f3c");
    s.app_skey = mac::key_from_hex("000102030405060708090a0b0c0d0e0f");
    return s;
}

struct TestUplink {
    Bytes mac;
    phy::SymbolBlock block;
    ru::RadioEvent event;
};

/// Device uplink as captured at a receiver `snr_db` above the default noise floor.
inline TestUplink make_uplink(mac::DeviceSession& s, int sf, double snr_db, std::uint64_t seed, Bytes payload = {1, 2, 3, 4, 5},
                              std::size_t lead = 37, std::uint32_t channel = 868100000, SimTime t0 = 1'000'000'000)
{
    TestUplink u;
    u.mac = mac::build_uplink(s, 1, payload, sf);
    const auto p = phy::PhyParams::make(sf);
    u.block = phy::phy_assemble({u.mac, std::nullopt}, p);
    const double nf = phy::noise_floor_dbm(p.bw_hz, config::constants().channel_model.noise_figure_db);
    u.event.channel_hz = channel;
    u.event.iq = netsim::synthesize_capture(u.block, p, nf + snr_db, nf, lead, seed);
    u.event.true_tx_power_dbm = 14;
    u.event.arrival_time = t0;
    return u;
}

}  // namespace olrw::testing
