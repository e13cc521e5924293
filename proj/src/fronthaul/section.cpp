/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/fronthaul/section.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <regex>

#include "fields.hpp"
#include "olrw/common/error.hpp"

namespace olrw::fronthaul {

using detail::Attr;

std::uint8_t bandwidth_code(std::uint32_t bw_hz)
{
    switch (bw_hz) {
    case 125000: return 0;
    case 250000: return 1;
    case 500000: return 2;
    default: raise(ErrorKind::Range, "no bandwidth code for " + std::to_string(bw_hz) + " Hz");
    }
}

std::uint32_t bandwidth_hz(std::uint8_t code)
{
    switch (code) {
    case 0: return 125000;
    case 1: return 250000;
    case 2: return 500000;
    default: raise(ErrorKind::Range, "bandwidth code " + std::to_string(code) + " undefined");
    }
}

std::uint8_t quantize_metric(float peak_ratio)
{
    if (!(peak_ratio > 1.0f))
        return 0;
    const double q = std::round(4.0 * 20.0 * std::log10(static_cast<double>(peak_ratio)));
    return static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
}

double metric_db(std::uint8_t metric_q) { return metric_q / 4.0; }

const std::array<AttributeSpec, kAttributeCount>& attribute_table()
{
    using D = AttrDirection;
    using R = Requirement;
    static const std::array<AttributeSpec, kAttributeCount> table{{
        {"iSample", D::UL, R::Optional, 0},
        {"qSample", D::UL, R::Optional, 0},
        {"Demodulation Information", D::UL, R::Required, 0},
        {"Uplink Channel SNR", D::UL, R::Required, 8},
        {"Battery Status of Device", D::UL, R::Optional, 8},
        {"Uplink Frequency Hopping", D::UL, R::Optional, 1},
        {"Timestamp Reception", D::UL, R::Required, 64},
        {"Uplink Channel RSSI", D::UL, R::Required, 8},
        {"Uplink Channel Utilization", D::UL, R::Optional, 8},
        {"Device Power Source", D::UL, R::Optional, 3},
        {"Timing Advance", D::UL, R::Required, 8},
        {"Receive Window Configuration", D::Both, R::Optional, 8},
        {"Channel Plan Configuration", D::Both, R::Optional, 4},
        {"Frequency Band", D::Both, R::Optional, 4},
        {"Spreading Factor", D::Both, R::Required, 4},
        {"End-device Firmware Version", D::Both, R::Optional, 0},
        {"Preamble Length", D::Both, R::Optional, 8},
        {"Antenna Selection", D::Both, R::Optional, 0},
        {"Channel Index", D::Both, R::Optional, 8},
        {"Bandwidth", D::Both, R::Required, 4},
        {"LoRaWAN Version", D::Both, R::Required, 8},
        {"Data Direction", D::Both, R::Required, 1},
        {"Payload Version", D::Both, R::Required, 3},
        {"Filter Index", D::Both, R::Optional, 4},
        {"Section ID", D::Both, R::Required, 8},
        {"Section Options Length", D::Both, R::Required, 8},
        {"Device Address", D::DL, R::Required, 32},
        {"Downlink Payload Content", D::DL, R::Required, 0},
        {"Frequency Hopping Pattern", D::DL, R::Optional, 8},
        {"Transmission power level", D::DL, R::Required, 8},
        {"Transmission Slot", D::DL, R::Required, 64},
        {"RX Window Configuration", D::DL, R::Optional, 16},
        {"Device Class Type", D::DL, R::Optional, 2},
        {"Energy Efficiency Considerations", D::DL, R::Optional, 8},
        {"Network Synchronization", D::DL, R::Optional, 0},
        {"Traffic Prioritization", D::DL, R::Optional, 0},
        {"Beacon Broadcasting", D::DL, R::Optional, 0},
    }};
    return table;
}

std::size_t attribute_index(std::string_view name)
{
    const auto& t = attribute_table();
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i].name == name)
            return i;
    raise(ErrorKind::NotFound, "no attribute named '" + std::string(name) + "'");
}

bool attribute_present(const LoRaWANSection& s, std::size_t index)
{
    if (index >= kAttributeCount)
        raise(ErrorKind::Range, "attribute index out of range");
    if (detail::in_header_group(index))
        return true;
    return detail::field_ops()[index].present(s);
}

namespace {

std::string describe(const AttributeSpec& a)
{
    std::string dir = a.direction == AttrDirection::UL ? "UL" : a.direction == AttrDirection::DL ? "DL" : "UL/DL";
    std::string width = a.bits ? std::to_string(a.bits) + " bits" : "variable length";
    return dir + ", " + (a.requirement == Requirement::Required ? "Required" : "Optional") + ", " + width;
}

bool applies(AttrDirection a, Direction d)
{
    return a == AttrDirection::Both || (a == AttrDirection::UL) == (d == Direction::UL);
}

}  // namespace

std::vector<Violation> validate_section(const LoRaWANSection& s)
{
    std::vector<Violation> v;
    const auto& t = attribute_table();
    auto add = [&](std::size_t idx, std::string msg) { v.push_back({std::string(t[idx].name), std::move(msg)}); };

    if (s.direction != Direction::UL && s.direction != Direction::DL)
        add(Attr::kDataDirection, "direction must be UL or DL");
    if (s.spreading_factor < 7 || s.spreading_factor > 12)
        add(Attr::kSpreadingFactor, "SF" + std::to_string(s.spreading_factor) + " outside SF7 to SF12");
    if (s.bandwidth_code > 2)
        add(Attr::kBandwidth, "code " + std::to_string(s.bandwidth_code) + " is not 125 kHz, 250 kHz, or 500 kHz");
    if (s.payload_version > 7)
        add(Attr::kPayloadVersion, "does not fit 3 bits");
    if (s.filter_index && *s.filter_index > 15)
        add(Attr::kFilterIndex, "does not fit 4 bits");

    for (std::size_t i = 0; i < kAttributeCount; ++i) {
        if (detail::in_header_group(i))
            continue;
        const bool present = detail::field_ops()[i].present(s);
        if (!applies(t[i].direction, s.direction)) {
            if (present)
                add(i, "not carried in a " + std::string(s.direction == Direction::UL ? "UL" : "DL") + " section (" +
                           describe(t[i]) + ")");
        } else if (t[i].requirement == Requirement::Required && !present) {
            add(i, "absent (" + describe(t[i]) + ")");
        }
    }

    const std::uint32_t symbol_limit = s.spreading_factor <= 12 ? (1u << std::min<int>(s.spreading_factor, 12)) : 0;
    if (s.i_samples && s.i_samples->size() * 4 > 65535)
        add(Attr::kISample, "more samples than a 16-bit octet count can carry");
    if (s.q_samples && s.q_samples->size() * 4 > 65535)
        add(Attr::kQSample, "more samples than a 16-bit octet count can carry");
    if (s.i_samples && s.q_samples && s.i_samples->size() != s.q_samples->size())
        add(Attr::kQSample, "length differs from iSample");
    if (s.demodulation_info) {
        if (2 + 3 * s.demodulation_info->size() > 65535)
            add(Attr::kDemodInfo, "too many symbols for a 16-bit octet count");
        for (const auto& e : *s.demodulation_info)
            if (e.symbol >= symbol_limit) {
                add(Attr::kDemodInfo, "symbol " + std::to_string(e.symbol) + " exceeds 2^SF");
                break;
            }
    }
    if (s.uplink_rssi_dbm && (*s.uplink_rssi_dbm < -256 || *s.uplink_rssi_dbm > -1))
        add(Attr::kUlRssi, std::to_string(*s.uplink_rssi_dbm) + " dBm outside -256..-1 dBm");
    if (s.channel_utilization_pct && *s.channel_utilization_pct > 100)
        add(Attr::kUlUtilization, "percentage above 100");
    if (s.device_power_source && static_cast<unsigned>(*s.device_power_source) > 3)
        add(Attr::kPowerSource, "not one of Battery, USB, Solar, Mains");
    if (s.channel_plan_cfg && *s.channel_plan_cfg > 15)
        add(Attr::kChannelPlanCfg, "does not fit 4 bits");
    if (s.frequency_band && *s.frequency_band > 15)
        add(Attr::kFrequencyBand, "does not fit 4 bits");
    if (s.firmware_version) {
        static const std::regex semver(R"(^[0-9]+\.[0-9]+\.[0-9]+([-+][0-9A-Za-z.+-]+)?$)");
        if (!std::regex_match(*s.firmware_version, semver))
            add(Attr::kFirmwareVersion, "'" + *s.firmware_version + "' is not a semantic version");
        if (s.firmware_version->size() > 65535)
            add(Attr::kFirmwareVersion, "too long");
    }
    if (s.antenna_selection && s.antenna_selection->size() > 65535)
        add(Attr::kAntennaSelection, "too long");
    if (s.dl_payload) {
        if (s.dl_payload->size() * 2 > 65535)
            add(Attr::kDlPayload, "too many symbols for a 16-bit octet count");
        for (auto sym : *s.dl_payload)
            if (sym >= symbol_limit) {
                add(Attr::kDlPayload, "symbol " + std::to_string(sym) + " exceeds 2^SF");
                break;
            }
    }
    if (s.tx_power_dbm && (*s.tx_power_dbm < 2 || *s.tx_power_dbm > 20))
        add(Attr::kTxPower, std::to_string(*s.tx_power_dbm) + " dBm outside 2 dBm to 20 dBm");
    if (s.device_class && static_cast<unsigned>(*s.device_class) > 2)
        add(Attr::kDeviceClass, "not one of A, B, C");
    for (auto [idx, field] : {std::pair{Attr::kNetworkSync, &s.network_sync},
                              std::pair{Attr::kTrafficPriority, &s.traffic_priority},
                              std::pair{Attr::kBeaconBroadcast, &s.beacon_broadcast}})
        if (*field && (*field)->size() > 65535)
            add(idx, "too long");
    return v;
}

std::string format_violations(const std::vector<Violation>& v)
{
    std::string out;
    for (const auto& x : v) {
        if (!out.empty())
            out += "; ";
        out += x.attribute + ": " + x.message;
    }
    return out;
}

}  // namespace olrw::fronthaul
