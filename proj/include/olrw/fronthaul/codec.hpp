/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "olrw/common/bytes.hpp"
#include "olrw/fronthaul/section.hpp"

namespace olrw::fronthaul {

// Section layout (docs/wire-format.md has the full reference):
//   header group, 5 octets: SF(4) BW(4) | LoRaWAN version(8) | Direction(1)
//     PayloadVersion(3) reserved(4) | Section ID(8) | Section Options Length(8)
//   presence bitmap, 40 bits: bit i (MSB first) marks attribute i of the table
//   body: every other present attribute in table order. Runs of sub-octet fields
//     share zero-padded octets; wider fields start on an octet; variable fields
//     carry a 16-bit octet count.
// Section Options Length is the body size in octets, 255 meaning 255 or more.

constexpr std::uint8_t kLoRaWANSectionType = 0x09;
constexpr std::size_t kHeaderGroupOctets = 5;
constexpr std::size_t kPresenceOctets = 5;

/// Throws Validation naming the first offending attribute.
Bytes encode_section(const LoRaWANSection& s);
/// Throws Length on truncation, Format on malformed framing, Validation on rule breaches.
LoRaWANSection decode_section(ByteView bytes);

/// Derived Section Options Length for a section.
std::uint8_t section_options_length(const LoRaWANSection& s);

struct EcpriHeader {
    std::uint8_t revision = 1;  // 4 bits
    bool concat = false;
    std::uint8_t message_type = kLoRaWANSectionType;
    std::uint16_t payload_size = 0;

    bool operator==(const EcpriHeader&) const = default;
};

struct EcpriFrame {
    EcpriHeader header;
    Bytes payload;

    bool operator==(const EcpriFrame&) const = default;
};

constexpr std::size_t kEcpriHeaderOctets = 4;
constexpr std::size_t kMaxEcpriPayload = 65535;

/// 4-octet common header (revision 1, reserved zero) plus payload. Oversize throws Range.
Bytes encode_ecpri(ByteView payload, std::uint8_t message_type, bool concat = false);
/// Accepts types 0x00-0x09; types other than 0x09 are passed through opaque.
EcpriFrame decode_ecpri(ByteView frame);

/// Section wrapped in an eCPRI frame of type 0x09.
Bytes encode_frame(const LoRaWANSection& s, bool concat = false);
/// Decodes an eCPRI frame that must carry a LoRaWAN section.
LoRaWANSection decode_frame(ByteView frame);

// Capture file: magic "OLRW1", then for each frame a u32 big-endian length and the frame octets.
void write_capture(const std::filesystem::path& path, const std::vector<Bytes>& frames);
Bytes encode_capture(const std::vector<Bytes>& frames);
std::vector<Bytes> decode_capture(ByteView data);
std::vector<Bytes> read_capture(const std::filesystem::path& path);

}  // namespace olrw::fronthaul
