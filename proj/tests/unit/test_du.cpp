/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "../support/radio.hpp"
#include "doctest.h"
#include "olrw/common/error.hpp"
#include "olrw/du/du.hpp"
#include "olrw/fronthaul/codec.hpp"
#include "olrw/phy/coding.hpp"

using namespace olrw;
using namespace olrw::du;
using olrw::testing::make_uplink;
using olrw::testing::test_session;

namespace {

std::vector<fronthaul::LoRaWANSection> via_fronthaul(DistributedUnit& du, const std::vector<Bytes>& frames)
{
    std::optional<std::vector<fronthaul::LoRaWANSection>> got;
    for (const auto& f : frames) {
        CHECK_FALSE(got.has_value());
        got = du.on_fronthaul(f);
    }
    REQUIRE(got.has_value());
    return *got;
}

/// Device-side receiver: detection, demodulation and MAC recovery of a DL event.
Bytes device_receive(const ru::RadioEvent& ev, int sf)
{
    auto p = phy::PhyParams::make(sf, 125000, 1, 8, false);
    const auto cap = phy::receive_frame(ev.iq.samples, p);
    REQUIRE(cap.detection.sfd_found);
    std::vector<std::uint16_t> sym;
    for (const auto& r : cap.symbols)
        sym.push_back(r.symbol);
    return phy::phy_recover(sym, p).payload.bytes;
}

}  // namespace

TEST_CASE("uplink loopback through RU and DU")
{
    for (int sf : {7, 10, 12}) {
        CAPTURE(sf);
        auto s = test_session();
        ru::RadioUnit ru("gw1", ru::RuConfig{});
        DistributedUnit du("gw1");
        const auto u = make_uplink(s, sf, 6.0, 300 + sf, Bytes{9, 8, 7, 6, 5, 4, 3, 2, 1});
        const auto sections = via_fronthaul(du, ru.receive(u.event));
        const auto rec = du.process_uplink(sections);
        CHECK(rec.frame == u.mac);
        CHECK(rec.gateway_id == "gw1");
        CHECK(rec.sf == sf);
        CHECK(rec.channel_hz == 868100000u);
        CHECK(rec.mic_present);
        CHECK(rec.snr_db == *sections[0].uplink_snr_db);
        CHECK(rec.timestamp == static_cast<SimTime>(*sections[0].timestamp_reception));
    }
}

TEST_CASE("iq passthrough and symbol mode give identical records")
{
    for (int sf : {7, 9, 11}) {
        CAPTURE(sf);
        auto s = test_session();
        const auto u = make_uplink(s, sf, 2.0, 900 + sf, Bytes(20, 0x33), 101);
        ru::RadioUnit sym_ru("gw1", ru::RuConfig{});
        ru::RuConfig iq_cfg;
        iq_cfg.iq_passthrough = true;
        ru::RadioUnit iq_ru("gw1", iq_cfg);
        DistributedUnit a("gw1"), b("gw1");
        const auto ra = a.process_uplink(via_fronthaul(a, sym_ru.receive(u.event)));
        const auto iq_sections = via_fronthaul(b, iq_ru.receive(u.event));
        CHECK(iq_sections.front().demodulation_info->empty());
        const auto rb = b.process_uplink(iq_sections);
        CHECK(ra == rb);
        // Legacy wiring: sections handed over without the codec.
        DistributedUnit c("gw1");
        ru::RadioUnit legacy_ru("gw1", iq_cfg);
        CHECK(c.process_uplink(legacy_ru.receive_sections(u.event)) == ra);
    }
}

TEST_CASE("corrupted CRC is an integrity error and nothing is forwarded")
{
    auto s = test_session();
    ru::RadioUnit ru("gw1", ru::RuConfig{});
    DistributedUnit du("gw1");
    auto sections = ru.receive_sections(make_uplink(s, 7, 10.0, 5, Bytes{1, 2, 3, 4, 5, 6, 7, 8}).event);
    REQUIRE(sections.size() == 1);
    auto bad = sections;
    // Flip a bit in the last codeword block: the CRC nibbles of an 8+12-octet frame.
    auto& d = *bad[0].demodulation_info;
    auto sym = d[d.size() - 1].symbol;
    sym = phy::gray_decode(static_cast<std::uint16_t>(phy::gray_encode(sym) ^ 0x1));
    d[d.size() - 1].symbol = sym;
    d[d.size() - 2].symbol ^= 0x40;
    d[d.size() - 3].symbol ^= 0x40;
    try {
        du.process_uplink(bad);
        FAIL("expected integrity error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Integrity);
    }
    CHECK_FALSE(du.handle_uplink(bad).has_value());
    const auto k = du.report(0);
    CHECK(k.metrics.at("integrity_errors") == 1);
    CHECK(k.metrics.at("forwarded") == 0);
    CHECK(du.handle_uplink(sections).has_value());
}

TEST_CASE("downlink assembly round trip and limits")
{
    auto ns = test_session();
    auto dev = ns;
    DistributedUnit du("gw1");
    ru::RadioUnit ru("gw1", ru::RuConfig{});
    const Bytes mac = mac::build_downlink(ns, 2, Bytes{0xAA, 0xBB, 0xCC}, 9, mac::TxOptions{.ack = true});
    DlParams tx{dev.dev_addr, 9, 868300000, 14, from_seconds(11)};
    const Bytes frame = du.build_downlink_frame(mac, tx);
    CHECK(frame[1] == fronthaul::kLoRaWANSectionType);
    const auto sec = fronthaul::decode_frame(frame);
    CHECK(*sec.device_address == dev.dev_addr);
    CHECK(*sec.tx_power_dbm == 14);
    CHECK(*sec.transmission_slot == static_cast<std::uint64_t>(from_seconds(11)));
    const auto ev = ru.transmit(frame, from_seconds(10.5));
    CHECK(ev.channel_hz == 868300000u);
    CHECK(ev.arrival_time == from_seconds(11));
    CHECK(device_receive(ev, 9) == mac);
    const auto v = mac::parse_and_verify(device_receive(ev, 9), dev);
    CHECK(v.mic_ok);
    CHECK(v.frame.fctrl.ack);

    tx.tx_power_dbm = 25;
    try {
        du.build_downlink(mac, tx);
        FAIL("expected range error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Range);
        CHECK(std::string(e.what()).find("2 dBm to 20 dBm") != std::string::npos);
    }
}

TEST_CASE("duty-cycle budget")
{
    DistributedUnit du("gw1");
    const Bytes mac(40, 0x11);
    const auto p = phy::PhyParams::make(12, 125000, 1, 8, false);
    const double air = phy::airtime_s(p, mac.size());
    // Independent count: the budget is 1% of 3600 s = 36 s.
    const int fit = static_cast<int>(36.0 / air);
    int ok = 0;
    for (int i = 0; i < fit + 3; ++i) {
        try {
            du.build_downlink(mac, {1, 12, 869525000, 14, from_seconds(10.0 + 5 * i)});
            ++ok;
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DutyCycle);
        }
    }
    CHECK(ok == fit);
    CHECK(du.duty().used_s(1, from_seconds(10.0 + 5 * fit)) == doctest::Approx(fit * air));
    // Another sub-band keeps its own budget.
    CHECK_NOTHROW(du.build_downlink(mac, {1, 12, 868100000, 14, from_seconds(30)}));
    // An hour later the window has slid past the early transmissions.
    CHECK_NOTHROW(du.build_downlink(mac, {1, 12, 869525000, 14, from_seconds(10 + 3600)}));
}

TEST_CASE("rx windows")
{
    DistributedUnit du("gw1");
    const auto w = du.rx_windows(from_seconds(10.0), 868500000, 9);
    CHECK(w.rx1.time == from_seconds(11.0));
    CHECK(w.rx2.time == from_seconds(12.0));
    CHECK(w.rx1.channel_hz == 868500000u);
    CHECK(w.rx1.sf == 9);
    CHECK(w.rx2.channel_hz == 869525000u);
    CHECK(w.rx2.sf == 12);
    du.apply_config({{"rx2_delay_s", 6.0}});
    du.apply_config({{"rx1_delay_s", 5.0}});
    CHECK(du.rx_windows(from_seconds(10.0), 868500000, 9).rx1.time == from_seconds(15.0));
    du.apply_control("rx2_sf", 9);
    CHECK(du.rx_windows(from_seconds(10.0), 868500000, 9).rx2.sf == 9);
    CHECK_THROWS_AS(du.apply_config({{"rx1_delay_s", 7.0}}), Error);
}

TEST_CASE("forwarding to the network server")
{
    auto s = test_session();
    DistributedUnit du("gw1");
    UplinkRecord r;
    r.frame = mac::build_uplink(s, 1, Bytes{1}, 7);
    r.mac_frame = mac::parse_mac(r.frame);
    CHECK(du.forward_to_ns(r).size() == 1);
    du.set_ns_reachable(false);
    CHECK(du.forward_to_ns(r).empty());
    CHECK(du.retry_queue_depth() == 1);
    du.set_ns_reachable(true);
    CHECK(du.flush_retry_queue().size() == 1);
    du.set_ns_reachable(false);
    for (int i = 0; i < 1005; ++i)
        du.forward_to_ns(r);
    CHECK(du.retry_queue_depth() == 1000);
    CHECK(du.report(0).metrics.at("dropped") == 5);
    du.set_ns_reachable(true);
    CHECK(du.forward_to_ns(r).size() == 1001);
}

TEST_CASE("record transport and security passthrough")
{
    auto s = test_session();
    UplinkRecord r;
    r.frame = mac::build_uplink(s, 1, Bytes{1, 2}, 7);
    r.gateway_id = "gw-7";
    r.snr_db = -3;
    r.rssi_dbm = -110;
    r.timestamp = 123456789;
    r.sf = 9;
    r.channel_hz = 868300000;
    r = security_passthrough(r);
    CHECK(r.mic_present);
    CHECK(decode_record(encode_record(r)) == r);
    const std::string stream = frame_record(r) + frame_record(r);
    CHECK(unframe_records(stream).size() == 2);
    CHECK_THROWS_AS(unframe_records(stream.substr(0, stream.size() - 2)), Error);

    auto truncated = r;
    truncated.frame.resize(10);
    try {
        security_passthrough(truncated);
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }
    auto zero = r;
    std::fill(zero.frame.end() - 4, zero.frame.end(), 0);
    CHECK_FALSE(security_passthrough(zero).mic_present);
    CHECK(decode_record(encode_record(security_passthrough(zero))).mic_present == false);
}

TEST_CASE("du control paths")
{
    auto s = test_session();
    ru::RadioUnit ru("gw1", ru::RuConfig{});
    DistributedUnit du("gw1");
    CHECK_THROWS_AS(du.apply_control("device/26011bda/dl_tx_power_dbm", 10), Error);
    REQUIRE(du.handle_uplink(ru.receive_sections(make_uplink(s, 7, 10.0, 1).event)).has_value());
    du.apply_control("device/26011bda/dl_tx_power_dbm", 10);
    CHECK(du.dl_tx_power_for(0x26011BDA) == 10);
    CHECK(du.dl_tx_power_for(0x1) == 14);
    CHECK_THROWS_AS(du.apply_control("device/26011bda/dl_tx_power_dbm", 30), Error);
    CHECK_THROWS_AS(du.apply_control("no_such_param", 1), Error);
    du.apply_control("duty_cycle_limit", 0.1);
    CHECK(du.duty().limit() == 0.1);
    CHECK_THROWS_AS(du.apply_control("rx2_channel_hz", 433000000), Error);
}
