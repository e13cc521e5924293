/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olrw/common/bytes.hpp"

namespace olrw::fronthaul {

enum class Direction : std::uint8_t { UL = 0, DL = 1 };
enum class DeviceClass : std::uint8_t { A = 0, B = 1, C = 2 };
enum class PowerSource : std::uint8_t { Battery = 0, Usb = 1, Solar = 2, Mains = 3 };

/// Bandwidth codes: 0 = 125 kHz, 1 = 250 kHz, 2 = 500 kHz.
std::uint8_t bandwidth_code(std::uint32_t bw_hz);
std::uint32_t bandwidth_hz(std::uint8_t code);

/// One demodulated symbol. metric_q is the peak metric in dB, Q6.2, saturating.
struct DemodEntry {
    std::uint16_t symbol = 0;
    std::uint8_t metric_q = 0;

    bool operator==(const DemodEntry&) const = default;
};

std::uint8_t quantize_metric(float peak_ratio);
double metric_db(std::uint8_t metric_q);

/// LoRaWAN section (type 0x09). Direction-required attributes are optional in the
/// struct so a missing one can be represented and reported; Section Options Length
/// is derived by the encoder and is not stored.
struct LoRaWANSection {
    Direction direction = Direction::UL;
    std::uint8_t payload_version = 1;  // 3 bits
    std::uint8_t section_id = 0;
    std::uint8_t spreading_factor = 7;  // 4 bits, 7..12
    std::uint8_t bandwidth_code = 0;    // 4 bits
    std::uint8_t lorawan_version = 0x10;
    std::optional<std::uint8_t> filter_index;  // 4 bits

    // Uplink
    std::optional<std::vector<float>> i_samples;
    std::optional<std::vector<float>> q_samples;
    std::optional<std::vector<DemodEntry>> demodulation_info;
    std::optional<std::int8_t> uplink_snr_db;
    std::optional<std::uint8_t> battery_status;
    std::optional<bool> uplink_freq_hopping;
    std::optional<std::uint64_t> timestamp_reception;  // ns
    std::optional<std::int16_t> uplink_rssi_dbm;       // -256..-1, carried as rssi + 128
    std::optional<std::uint8_t> channel_utilization_pct;
    std::optional<PowerSource> device_power_source;
    std::optional<std::uint8_t> timing_advance;

    // Either direction
    std::optional<std::uint8_t> receive_window_cfg;
    std::optional<std::uint8_t> channel_plan_cfg;  // 4 bits
    std::optional<std::uint8_t> frequency_band;    // 4 bits
    std::optional<std::string> firmware_version;
    std::optional<std::uint8_t> preamble_length;
    std::optional<Bytes> antenna_selection;
    std::optional<std::uint8_t> channel_index;

    // Downlink
    std::optional<std::uint32_t> device_address;
    std::optional<std::vector<std::uint16_t>> dl_payload;  // symbols
    std::optional<std::uint8_t> freq_hopping_pattern;
    std::optional<std::uint8_t> tx_power_dbm;
    std::optional<std::uint64_t> transmission_slot;  // ns
    std::optional<std::uint16_t> rx_window_cfg;
    std::optional<DeviceClass> device_class;
    std::optional<std::uint8_t> energy_mode;
    std::optional<Bytes> network_sync;
    std::optional<Bytes> traffic_priority;
    std::optional<Bytes> beacon_broadcast;

    bool operator==(const LoRaWANSection&) const = default;
};

enum class AttrDirection : std::uint8_t { UL, DL, Both };
enum class Requirement : std::uint8_t { Required, Optional };

struct AttributeSpec {
    std::string_view name;
    AttrDirection direction;
    Requirement requirement;
    int bits;  ///< 0 for variable length
};

constexpr std::size_t kAttributeCount = 37;
constexpr std::size_t kPresenceBits = 40;

/// Attributes in table order; index i is presence-bitmap bit i (MSB first).
const std::array<AttributeSpec, kAttributeCount>& attribute_table();

/// Index into attribute_table() by attribute name; throws NotFound.
std::size_t attribute_index(std::string_view name);

/// Attribute presence in a section (header-group attributes are always present).
bool attribute_present(const LoRaWANSection& s, std::size_t index);

struct Violation {
    std::string attribute;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Empty iff every range and direction-requirement rule holds.
std::vector<Violation> validate_section(const LoRaWANSection& s);

std::string format_violations(const std::vector<Violation>& v);

}  // namespace olrw::fronthaul
