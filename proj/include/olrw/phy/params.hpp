/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "olrw/common/bytes.hpp"

namespace olrw::phy {

using Sample = std::complex<float>;

/// Low-data-rate optimization is switched on when a symbol lasts at least 16.384 ms.
bool ldro_required(int sf, std::uint32_t bw_hz);

struct PhyParams {
    int sf = 7;
    std::uint32_t bw_hz = 125000;
    int cr = 1;  ///< coding rate 4/(4+cr)
    int preamble_len = 8;
    bool crc_on = true;
    bool ldro = false;

    /// Builds parameters with ldro derived from sf/bw.
    static PhyParams make(int sf, std::uint32_t bw_hz = 125000, int cr = 1, int preamble_len = 8, bool crc_on = true);

    std::uint32_t chips() const { return 1u << sf; }
    double symbol_time_s() const { return static_cast<double>(chips()) / bw_hz; }
    /// Throws Range when any field is outside its domain.
    void validate() const;

    bool operator==(const PhyParams&) const = default;
};

/// Complex baseband at one sample per chip.
struct IQBuffer {
    std::vector<Sample> samples;
    double sample_rate_hz = 0;

    bool operator==(const IQBuffer&) const = default;
};

struct PhyPayload {
    Bytes bytes;
    std::optional<std::uint16_t> crc16;

    bool operator==(const PhyPayload&) const = default;
};

/// Data symbols of one frame; the preamble is carried as a count and expanded at modulation.
struct SymbolBlock {
    int preamble_len = 8;
    std::vector<std::uint16_t> symbols;

    bool operator==(const SymbolBlock&) const = default;
};

/// LoRa network sync word 0x34 as two upchirp symbol values.
inline constexpr std::uint16_t kSyncSymbol1 = 24;
inline constexpr std::uint16_t kSyncSymbol2 = 32;

}  // namespace olrw::phy
