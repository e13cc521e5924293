/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <vector>

#include "olrw/common/bytes.hpp"
#include "olrw/common/error.hpp"
#include "olrw/phy/params.hpp"

namespace olrw::phy {

// Whitening: PN9 LFSR, polynomial x^9 + x^5 + 1, seed 0x1FF. Each keystream octet is
// the low eight register bits; the register then advances eight times, feeding
// bit0 ^ bit5 into bit 8.
Bytes pn9_keystream(std::size_t n);
Bytes whiten(ByteView data);

std::uint16_t crc16(ByteView data);  // CRC-16/CCITT-FALSE

/// Codeword of 4+cr bits; data nibble in bits 0..3, parity above.
std::uint8_t fec_encode(std::uint8_t nibble, int cr);

struct FecDecoded {
    std::uint8_t nibble = 0;
    bool corrected = false;  ///< a correction (cr 3/4) or a detection (cr 1/2) fired
};

/// cr 3/4 correct one bit error; cr 1/2 only detect. A cr=4 double error throws
/// FecError carrying the best-effort nibble.
FecDecoded fec_decode(std::uint8_t codeword, int cr);

class FecError : public Error {
public:
    FecError(std::uint8_t best_effort, const std::string& what)
        : Error(ErrorKind::Integrity, what), best_effort_(best_effort) {}
    std::uint8_t best_effort() const { return best_effort_; }

private:
    std::uint8_t best_effort_;
};

/// rows x cols bit matrix, row-major.
struct BitMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> bits;

    BitMatrix() = default;
    BitMatrix(int r, int c) : rows(r), cols(c), bits(static_cast<std::size_t>(r * c), 0) {}

    std::uint8_t& at(int r, int c) { return bits[static_cast<std::size_t>(r * cols + c)]; }
    std::uint8_t at(int r, int c) const { return bits[static_cast<std::size_t>(r * cols + c)]; }

    bool operator==(const BitMatrix&) const = default;
};

// Diagonal interleaver. Input row r is codeword r (bit c in column c); output column j
// is symbol j (bit i in row i). out(i, j) = in((i + j) mod rows, j).
BitMatrix interleave(const BitMatrix& block, const PhyParams& p);
BitMatrix deinterleave(const BitMatrix& matrix, const PhyParams& p);
/// Same permutation for any dimensions (the header block uses sf-2 rows).
BitMatrix interleave_any(const BitMatrix& block);
BitMatrix deinterleave_any(const BitMatrix& matrix);

constexpr std::uint32_t gray_encode(std::uint32_t x) { return x ^ (x >> 1); }
constexpr std::uint32_t gray_decode(std::uint32_t g)
{
    for (std::uint32_t s = 1; s < 32; s <<= 1)
        g ^= g >> s;
    return g;
}

}  // namespace olrw::phy
