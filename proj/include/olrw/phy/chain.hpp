/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "olrw/common/error.hpp"
#include "olrw/phy/params.hpp"

namespace olrw::phy {

// Frame layout (data symbols):
//   header block: 8 symbols carrying sf-2 codewords at cr=4, reduced rate
//     (symbol = value << 2). Codewords: length hi, length lo, cr, crc_on << 3,
//     xor checksum of the previous four, then the first sf-7 payload nibbles.
//   payload blocks: sf codewords (sf-2 with ldro) at the frame cr, 4+cr symbols each.
// Payload nibbles: whitened payload octets, then the CRC (big-endian, not whitened),
// low nibble first. Symbol values are the inverse Gray map of the interleaver output.

constexpr std::size_t kMaxPayload = 255;
constexpr int kHeaderSymbols = 8;

/// Data symbols for a payload length; matches the conventional airtime symbol count.
std::size_t data_symbol_count(std::size_t payload_len, const PhyParams& p);

/// Time on air: symbol time x (preamble + 4.25 + data symbols).
double frame_airtime_s(const PhyParams& p, std::size_t data_symbols);
double airtime_s(const PhyParams& p, std::size_t payload_len);

/// TX chain: whiten, append CRC, FEC encode, interleave, Gray map.
SymbolBlock phy_assemble(const PhyPayload& payload, const PhyParams& p);

struct RecoverResult {
    PhyPayload payload;
    bool crc_ok = false;
    int cr = 0;
    bool crc_on = false;
    int corrected = 0;  ///< codewords where FEC corrected or detected an error
    std::size_t symbols_used = 0;
};

/// Raised when the header or a payload codeword cannot be decoded.
class PhyIntegrityError : public Error {
public:
    PhyIntegrityError(const std::string& what, int corrected, int uncorrectable)
        : Error(ErrorKind::Integrity, what), corrected_(corrected), uncorrectable_(uncorrectable) {}
    int corrected() const { return corrected_; }
    int uncorrectable() const { return uncorrectable_; }

private:
    int corrected_;
    int uncorrectable_;
};

/// RX chain: Gray map, deinterleave, FEC decode, dewhiten, CRC check. Extra trailing
/// symbols are ignored. A CRC mismatch is reported through crc_ok.
RecoverResult phy_recover(std::span<const std::uint16_t> symbols, const PhyParams& p);
RecoverResult phy_recover(const SymbolBlock& block, const PhyParams& p);

}  // namespace olrw::phy
