/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "olrw/fronthaul/codec.hpp"
#include "olrw/fronthaul/section.hpp"

namespace olrw::testing {

using namespace olrw::fronthaul;

struct Row {
    const char* name;
    const char* dir;
    const char* req;
    int bits;  // 0 == Variable
};

// Transcribed row by row from the section-type attribute table.
inline const Row kTable[] = {
    {"iSample", "UL", "Optional", 0},
    {"qSample", "UL", "Optional", 0},
    {"Demodulation Information", "UL", "Required", 0},
    {"Uplink Channel SNR", "UL", "Required", 8},
    {"Battery Status of Device", "UL", "Optional", 8},
    {"Uplink Frequency Hopping", "UL", "Optional", 1},
    {"Timestamp Reception", "UL", "Required", 64},
    {"Uplink Channel RSSI", "UL", "Required", 8},
    {"Uplink Channel Utilization", "UL", "Optional", 8},
    {"Device Power Source", "UL", "Optional", 3},
    {"Timing Advance", "UL", "Required", 8},
    {"Receive Window Configuration", "UL/DL", "Optional", 8},
    {"Channel Plan Configuration", "UL/DL", "Optional", 4},
    {"Frequency Band", "UL/DL", "Optional", 4},
    {"Spreading Factor", "UL/DL", "Required", 4},
    {"End-device Firmware Version", "UL/DL", "Optional", 0},
    {"Preamble Length", "UL/DL", "Optional", 8},
    {"Antenna Selection", "UL/DL", "Optional", 0},
    {"Channel Index", "UL/DL", "Optional", 8},
    {"Bandwidth", "UL/DL", "Required", 4},
    {"LoRaWAN Version", "UL/DL", "Required", 8},
    {"Data Direction", "UL/DL", "Required", 1},
    {"Payload Version", "UL/DL", "Required", 3},
    {"Filter Index", "UL/DL", "Optional", 4},
    {"Section ID", "UL/DL", "Required", 8},
    {"Section Options Length", "UL/DL", "Required", 8},
    {"Device Address", "DL", "Required", 32},
    {"Downlink Payload Content", "DL", "Required", 0},
    {"Frequency Hopping Pattern", "DL", "Optional", 8},
    {"Transmission power level", "DL", "Required", 8},
    {"Transmission Slot", "DL", "Required", 64},
    {"RX Window Configuration", "DL", "Optional", 16},
    {"Device Class Type", "DL", "Optional", 2},
    {"Energy Efficiency Considerations", "DL", "Optional", 8},
    {"Network Synchronization", "DL", "Optional", 0},
    {"Traffic Prioritization", "DL", "Optional", 0},
    {"Beacon Broadcasting", "DL", "Optional", 0},
};

inline LoRaWANSection minimal_ul()
{
    LoRaWANSection s;
    s.direction = Direction::UL;
    s.payload_version = 1;
    s.spreading_factor = 7;
    s.bandwidth_code = 0;
    s.lorawan_version = 0x10;
    s.demodulation_info = std::vector<DemodEntry>{};
    s.uplink_snr_db = 5;
    s.timestamp_reception = 1000;
    s.uplink_rssi_dbm = -100;
    s.timing_advance = 0;
    return s;
}

inline LoRaWANSection minimal_dl()
{
    LoRaWANSection s;
    s.direction = Direction::DL;
    s.payload_version = 1;
    s.spreading_factor = 9;
    s.bandwidth_code = 0;
    s.lorawan_version = 0x10;
    s.device_address = 0x26011BDA;
    s.dl_payload = std::vector<std::uint16_t>{};
    s.tx_power_dbm = 14;
    s.transmission_slot = 5'000'000'000ull;
    return s;
}

inline bool bitmap_bit(const Bytes& enc, std::size_t i)
{
    return (enc[kHeaderGroupOctets + i / 8] >> (7 - i % 8)) & 1u;
}

// Sets attribute i on a section with a known value; returns the octets the value
// adds to the body when it is the only sub-octet field of its run.
using Setter = std::function<std::size_t(LoRaWANSection&)>;

inline std::vector<Setter> setters()
{
    std::vector<Setter> v(37);
    v[0] = [](auto& s) { s.i_samples = std::vector<float>{1.f, -2.f, 0.5f}; return 2 + 12; };
    v[1] = [](auto& s) { s.q_samples = std::vector<float>{0.f, 3.f, -1.f}; return 2 + 12; };
    v[2] = [](auto& s) { s.demodulation_info = std::vector<DemodEntry>{{3, 9}, {100, 255}}; return 2 + 2 + 6; };
    v[3] = [](auto& s) { s.uplink_snr_db = -12; return 1; };
    v[4] = [](auto& s) { s.battery_status = 77; return 1; };
    v[5] = [](auto& s) { s.uplink_freq_hopping = true; return 1; };
    v[6] = [](auto& s) { s.timestamp_reception = 123456789ull; return 8; };
    v[7] = [](auto& s) { s.uplink_rssi_dbm = -120; return 1; };
    v[8] = [](auto& s) { s.channel_utilization_pct = 40; return 1; };
    v[9] = [](auto& s) { s.device_power_source = PowerSource::Solar; return 1; };
    v[10] = [](auto& s) { s.timing_advance = 3; return 1; };
    v[11] = [](auto& s) { s.receive_window_cfg = 1; return 1; };
    v[12] = [](auto& s) { s.channel_plan_cfg = 2; return 1; };
    v[13] = [](auto& s) { s.frequency_band = 5; return 1; };
    v[15] = [](auto& s) { s.firmware_version = std::string("1.2.3"); return 2 + 5; };
    v[16] = [](auto& s) { s.preamble_length = 8; return 1; };
    v[17] = [](auto& s) { s.antenna_selection = Bytes{0, 1}; return 2 + 2; };
    v[18] = [](auto& s) { s.channel_index = 2; return 1; };
    v[23] = [](auto& s) { s.filter_index = 9; return 1; };
    v[26] = [](auto& s) { s.device_address = 0x01020304u; return 4; };
    v[27] = [](auto& s) { s.dl_payload = std::vector<std::uint16_t>{1, 2, 3}; return 2 + 6; };
    v[28] = [](auto& s) { s.freq_hopping_pattern = 4; return 1; };
    v[29] = [](auto& s) { s.tx_power_dbm = 20; return 1; };
    v[30] = [](auto& s) { s.transmission_slot = 42ull; return 8; };
    v[31] = [](auto& s) { s.rx_window_cfg = 0x1234; return 2; };
    v[32] = [](auto& s) { s.device_class = DeviceClass::C; return 1; };
    v[33] = [](auto& s) { s.energy_mode = 1; return 1; };
    v[34] = [](auto& s) { s.network_sync = Bytes{9, 9, 9}; return 2 + 3; };
    v[35] = [](auto& s) { s.traffic_priority = Bytes{1}; return 2 + 1; };
    v[36] = [](auto& s) { s.beacon_broadcast = Bytes{}; return 2; };
    return v;
}

inline void clear_attr(LoRaWANSection& s, std::size_t i)
{
    switch (i) {
    case 2: s.demodulation_info.reset(); break;
    case 3: s.uplink_snr_db.reset(); break;
    case 6: s.timestamp_reception.reset(); break;
    case 7: s.uplink_rssi_dbm.reset(); break;
    case 10: s.timing_advance.reset(); break;
    case 26: s.device_address.reset(); break;
    case 27: s.dl_payload.reset(); break;
    case 29: s.tx_power_dbm.reset(); break;
    case 30: s.transmission_slot.reset(); break;
    default: throw std::logic_error("not a direction-required attribute");
    }
}

/// Conformance of every table row against the codec: presence bit, direction,
/// requirement flag and encoded width. Returns one message per mismatch.
inline std::vector<std::string> attribute_conformance_failures()
{
    std::vector<std::string> bad;
    const auto& t = attribute_table();
    if (t.size() != std::size(kTable))
        bad.push_back("table has " + std::to_string(t.size()) + " rows");
    const auto set = setters();
    for (std::size_t i = 0; i < std::min(t.size(), std::size(kTable)); ++i) {
        const auto fail = [&](const std::string& what) { bad.push_back(std::string(kTable[i].name) + ": " + what); };
        const auto& a = t[i];
        const std::string dir = a.direction == AttrDirection::UL ? "UL" : a.direction == AttrDirection::DL ? "DL" : "UL/DL";
        if (a.name != kTable[i].name)
            fail("name " + std::string(a.name));
        if (dir != kTable[i].dir)
            fail("direction " + dir);
        if ((a.requirement == Requirement::Required) != (std::string(kTable[i].req) == "Required"))
            fail("requirement flag");
        if (a.bits != kTable[i].bits)
            fail("width " + std::to_string(a.bits));
        const bool header = i == 14 || (i >= 19 && i <= 22) || i == 24 || i == 25;
        for (auto d : {Direction::UL, Direction::DL}) {
            const bool applies = a.direction == AttrDirection::Both || (a.direction == AttrDirection::UL) == (d == Direction::UL);
            const LoRaWANSection base = d == Direction::UL ? minimal_ul() : minimal_dl();
            const Bytes enc0 = encode_section(base);
            if (header) {
                if (!bitmap_bit(enc0, i))
                    fail("header presence bit clear");
                continue;
            }
            if (!applies) {
                LoRaWANSection wrong = base;
                set[i](wrong);
                if (bitmap_bit(enc0, i) || validate_section(wrong).size() != 1)
                    fail("accepted in the wrong direction");
                continue;
            }
            const std::size_t expect_bits = static_cast<std::size_t>(kTable[i].bits + 7) / 8;
            if (a.requirement == Requirement::Required) {
                LoRaWANSection missing = base;
                clear_attr(missing, i);
                if (!bitmap_bit(enc0, i) || validate_section(missing).size() != 1)
                    fail("required but not enforced");
                LoRaWANSection with = missing;
                const std::size_t octets = set[i](with);
                if (kTable[i].bits && octets != expect_bits)
                    fail("width mismatch");
                if (decode_section(encode_section(with)) != with)
                    fail("round trip");
            } else {
                LoRaWANSection with = base;
                const std::size_t octets = set[i](with);
                const Bytes enc = encode_section(with);
                const std::size_t expect = kTable[i].bits ? expect_bits : octets;
                if (bitmap_bit(enc0, i) || !bitmap_bit(enc, i))
                    fail("optional presence bit");
                if (enc.size() - enc0.size() != expect)
                    fail("encoded width " + std::to_string(enc.size() - enc0.size()));
                if (decode_section(enc) != with)
                    fail("round trip");
            }
        }
    }
    return bad;
}

}  // namespace olrw::testing
