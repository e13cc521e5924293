/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/phy/coding.hpp"

#include <bit>
#include <string>

namespace olrw::phy {

Bytes pn9_keystream(std::size_t n)
{
    Bytes out(n);
    std::uint16_t state = 0x1FF;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<std::uint8_t>(state & 0xFF);
        for (int k = 0; k < 8; ++k) {
            const std::uint16_t fb = ((state >> 0) ^ (state >> 5)) & 1u;
            state = static_cast<std::uint16_t>((state >> 1) | (fb << 8));
        }
    }
    return out;
}

Bytes whiten(ByteView data)
{
    Bytes out(data.begin(), data.end());
    const Bytes ks = pn9_keystream(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] ^= ks[i];
    return out;
}

std::uint16_t crc16(ByteView data)
{
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t b : data) {
        crc ^= static_cast<std::uint16_t>(b) << 8;
        for (int k = 0; k < 8; ++k)
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021) : static_cast<std::uint16_t>(crc << 1);
    }
    return crc;
}

namespace {

void check_cr(int cr)
{
    if (cr < 1 || cr > 4)
        raise(ErrorKind::Range, "cr " + std::to_string(cr) + " outside 1..4");
}

inline unsigned bit(unsigned v, int i) { return (v >> i) & 1u; }

}  // namespace

std::uint8_t fec_encode(std::uint8_t nibble, int cr)
{
    check_cr(cr);
    if (nibble > 0xF)
        raise(ErrorKind::Range, "nibble " + std::to_string(nibble) + " > 15");
    const unsigned d0 = bit(nibble, 0), d1 = bit(nibble, 1), d2 = bit(nibble, 2), d3 = bit(nibble, 3);
    unsigned cw = nibble;
    switch (cr) {
    case 1:
        cw |= (d0 ^ d1 ^ d2 ^ d3) << 4;
        break;
    case 2:
        cw |= ((d0 ^ d1 ^ d2) << 4) | ((d1 ^ d2 ^ d3) << 5);
        break;
    default: {
        const unsigned p0 = d0 ^ d1 ^ d3, p1 = d0 ^ d2 ^ d3, p2 = d1 ^ d2 ^ d3;
        cw |= (p0 << 4) | (p1 << 5) | (p2 << 6);
        if (cr == 4)
            cw |= static_cast<unsigned>(std::popcount(cw) & 1) << 7;
        break;
    }
    }
    return static_cast<std::uint8_t>(cw);
}

FecDecoded fec_decode(std::uint8_t codeword, int cr)
{
    check_cr(cr);
    const int width = 4 + cr;
    if (codeword >> width)
        raise(ErrorKind::Shape, "codeword has bits beyond its " + std::to_string(width) + "-bit width");

    // Minimum-distance decoding over the 16 codewords; ties keep the lowest nibble.
    int best = 0, best_dist = 99;
    for (int x = 0; x < 16; ++x) {
        const int d = std::popcount(static_cast<unsigned>(codeword ^ fec_encode(static_cast<std::uint8_t>(x), cr)));
        if (d < best_dist) {
            best_dist = d;
            best = x;
        }
    }
    FecDecoded r{static_cast<std::uint8_t>(best), best_dist != 0};
    if (cr <= 2) {
        // Detection-only codes: report the received data bits unchanged.
        r.nibble = codeword & 0xF;
        return r;
    }
    if (cr == 4 && best_dist >= 2)
        throw FecError(r.nibble, "uncorrectable codeword 0x" + to_hex(Bytes{codeword}) + " at cr=4");
    return r;
}

namespace {

void check_dims(const BitMatrix& m)
{
    if (m.rows <= 0 || m.cols <= 0 || m.bits.size() != static_cast<std::size_t>(m.rows * m.cols))
        raise(ErrorKind::Shape, "malformed bit matrix");
}

void check_block(const BitMatrix& m, const PhyParams& p)
{
    check_dims(m);
    if (m.rows != p.sf || m.cols != 4 + p.cr)
        raise(ErrorKind::Shape, "block is " + std::to_string(m.rows) + "x" + std::to_string(m.cols) + ", expected " +
                                    std::to_string(p.sf) + "x" + std::to_string(4 + p.cr));
}

}  // namespace

BitMatrix interleave_any(const BitMatrix& in)
{
    check_dims(in);
    BitMatrix out(in.rows, in.cols);
    for (int i = 0; i < in.rows; ++i)
        for (int j = 0; j < in.cols; ++j)
            out.at(i, j) = in.at((i + j) % in.rows, j);
    return out;
}

BitMatrix deinterleave_any(const BitMatrix& in)
{
    check_dims(in);
    BitMatrix out(in.rows, in.cols);
    for (int i = 0; i < in.rows; ++i)
        for (int j = 0; j < in.cols; ++j)
            out.at((i + j) % in.rows, j) = in.at(i, j);
    return out;
}

BitMatrix interleave(const BitMatrix& block, const PhyParams& p)
{
    check_block(block, p);
    return interleave_any(block);
}

BitMatrix deinterleave(const BitMatrix& matrix, const PhyParams& p)
{
    check_block(matrix, p);
    return deinterleave_any(matrix);
}

}  // namespace olrw::phy
