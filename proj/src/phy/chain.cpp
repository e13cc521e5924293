/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/phy/chain.hpp"

#include <algorithm>

#include "olrw/phy/coding.hpp"

namespace olrw::phy {
namespace {

constexpr int kHeaderNibbles = 5;
constexpr int kHeaderCr = 4;

int header_rows(const PhyParams& p) { return p.sf - 2; }
int payload_rows(const PhyParams& p) { return p.ldro ? p.sf - 2 : p.sf; }

std::size_t nibbles_in_header_block(const PhyParams& p)
{
    return static_cast<std::size_t>(header_rows(p) - kHeaderNibbles);
}

std::size_t payload_blocks(std::size_t payload_nibbles, const PhyParams& p)
{
    const std::size_t in_header = nibbles_in_header_block(p);
    if (payload_nibbles <= in_header)
        return 0;
    const std::size_t rows = static_cast<std::size_t>(payload_rows(p));
    return (payload_nibbles - in_header + rows - 1) / rows;
}

std::size_t payload_nibble_count(std::size_t len, bool crc_on) { return 2 * len + (crc_on ? 4 : 0); }

// Encodes `rows` nibbles at `cr` and returns the interleaved symbol values, before Gray mapping.
std::vector<std::uint32_t> encode_block(const std::uint8_t* nibbles, int rows, int cr)
{
    BitMatrix m(rows, 4 + cr);
    for (int r = 0; r < rows; ++r) {
        const std::uint8_t cw = fec_encode(nibbles[r], cr);
        for (int c = 0; c < 4 + cr; ++c)
            m.at(r, c) = (cw >> c) & 1u;
    }
    const BitMatrix t = interleave_any(m);
    std::vector<std::uint32_t> values(static_cast<std::size_t>(4 + cr), 0);
    for (int j = 0; j < 4 + cr; ++j)
        for (int i = 0; i < rows; ++i)
            values[static_cast<std::size_t>(j)] |= static_cast<std::uint32_t>(t.at(i, j)) << i;
    return values;
}

struct BlockDecode {
    std::vector<std::uint8_t> nibbles;
    int corrected = 0;
    int failed = 0;
};

BlockDecode decode_block(const std::vector<std::uint32_t>& values, int rows, int cr)
{
    BitMatrix t(rows, 4 + cr);
    for (int j = 0; j < 4 + cr; ++j)
        for (int i = 0; i < rows; ++i)
            t.at(i, j) = (values[static_cast<std::size_t>(j)] >> i) & 1u;
    const BitMatrix m = deinterleave_any(t);
    BlockDecode out;
    out.nibbles.resize(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
        std::uint8_t cw = 0;
        for (int c = 0; c < 4 + cr; ++c)
            cw = static_cast<std::uint8_t>(cw | (m.at(r, c) << c));
        try {
            const auto d = fec_decode(cw, cr);
            out.nibbles[static_cast<std::size_t>(r)] = d.nibble;
            out.corrected += d.corrected ? 1 : 0;
        } catch (const FecError& e) {
            out.nibbles[static_cast<std::size_t>(r)] = e.best_effort();
            ++out.failed;
        }
    }
    return out;
}

}  // namespace

double frame_airtime_s(const PhyParams& p, std::size_t data_symbols)
{
    return p.symbol_time_s() * (p.preamble_len + 4.25 + static_cast<double>(data_symbols));
}

double airtime_s(const PhyParams& p, std::size_t payload_len)
{
    return frame_airtime_s(p, data_symbol_count(payload_len, p));
}

std::size_t data_symbol_count(std::size_t payload_len, const PhyParams& p)
{
    return static_cast<std::size_t>(kHeaderSymbols) +
           payload_blocks(payload_nibble_count(payload_len, p.crc_on), p) * static_cast<std::size_t>(4 + p.cr);
}

SymbolBlock phy_assemble(const PhyPayload& payload, const PhyParams& p)
{
    p.validate();
    const std::size_t len = payload.bytes.size();
    if (len < 1 || len > kMaxPayload)
        raise(ErrorKind::Range, "payload of " + std::to_string(len) + " octets outside 1..255");

    Bytes data = whiten(payload.bytes);
    if (p.crc_on) {
        const std::uint16_t crc = crc16(payload.bytes);
        data.push_back(static_cast<std::uint8_t>(crc >> 8));
        data.push_back(static_cast<std::uint8_t>(crc & 0xFF));
    }
    std::vector<std::uint8_t> nibbles;
    nibbles.reserve(data.size() * 2);
    for (auto b : data) {
        nibbles.push_back(b & 0xF);
        nibbles.push_back(b >> 4);
    }

    SymbolBlock out;
    out.preamble_len = p.preamble_len;
    out.symbols.reserve(data_symbol_count(len, p));

    // Header block, reduced rate.
    const int hrows = header_rows(p);
    std::vector<std::uint8_t> hdr(static_cast<std::size_t>(hrows), 0);
    hdr[0] = static_cast<std::uint8_t>(len >> 4);
    hdr[1] = static_cast<std::uint8_t>(len & 0xF);
    hdr[2] = static_cast<std::uint8_t>(p.cr);
    hdr[3] = static_cast<std::uint8_t>(p.crc_on ? 0x8 : 0x0);
    hdr[4] = hdr[0] ^ hdr[1] ^ hdr[2] ^ hdr[3];
    const std::size_t in_header = std::min(nibbles_in_header_block(p), nibbles.size());
    std::copy_n(nibbles.begin(), in_header, hdr.begin() + kHeaderNibbles);
    for (auto v : encode_block(hdr.data(), hrows, kHeaderCr))
        out.symbols.push_back(static_cast<std::uint16_t>(gray_decode(v) << 2));

    // Payload blocks, zero-padded.
    const int prows = payload_rows(p);
    const int shift = p.ldro ? 2 : 0;
    const std::size_t blocks = payload_blocks(nibbles.size(), p);
    nibbles.resize(in_header + blocks * static_cast<std::size_t>(prows), 0);
    for (std::size_t b = 0; b < blocks; ++b) {
        const auto* start = nibbles.data() + in_header + b * static_cast<std::size_t>(prows);
        for (auto v : encode_block(start, prows, p.cr))
            out.symbols.push_back(static_cast<std::uint16_t>(gray_decode(v) << shift));
    }
    return out;
}

RecoverResult phy_recover(std::span<const std::uint16_t> symbols, const PhyParams& p)
{
    p.validate();
    const std::uint32_t N = p.chips();
    for (auto s : symbols)
        if (s >= N)
            raise(ErrorKind::Range, "symbol " + std::to_string(s) + " >= 2^sf");
    if (symbols.size() < static_cast<std::size_t>(kHeaderSymbols))
        throw PhyIntegrityError("truncated frame: " + std::to_string(symbols.size()) + " symbols, header needs 8", 0, 0);

    // Reduced-rate symbols carry sf-2 bits; rounding to the nearest multiple of four
    // absorbs a one-bin demodulation slip.
    const int hrows = header_rows(p);
    const std::uint32_t hmask = (1u << hrows) - 1;
    std::vector<std::uint32_t> values(kHeaderSymbols);
    for (int j = 0; j < kHeaderSymbols; ++j)
        values[static_cast<std::size_t>(j)] = gray_encode(((symbols[static_cast<std::size_t>(j)] + 2u) >> 2) & hmask);
    const BlockDecode hdr = decode_block(values, hrows, kHeaderCr);
    const auto& h = hdr.nibbles;
    if (hdr.failed)
        throw PhyIntegrityError("header codewords uncorrectable", hdr.corrected, hdr.failed);
    if ((h[0] ^ h[1] ^ h[2] ^ h[3]) != h[4])
        throw PhyIntegrityError("header checksum mismatch", hdr.corrected, 1);
    const std::size_t len = static_cast<std::size_t>(h[0] << 4 | h[1]);
    const int cr = h[2];
    const bool crc_on = (h[3] & 0x8) != 0;
    if (len < 1 || cr < 1 || cr > 4 || (h[3] & 0x7) != 0)
        throw PhyIntegrityError("header fields invalid", hdr.corrected, 1);

    PhyParams fp = p;
    fp.cr = cr;
    fp.crc_on = crc_on;
    const std::size_t total_nibbles = payload_nibble_count(len, crc_on);
    const std::size_t blocks = payload_blocks(total_nibbles, fp);
    const std::size_t need = data_symbol_count(len, fp);
    if (symbols.size() < need)
        throw PhyIntegrityError("truncated frame: " + std::to_string(symbols.size()) + " symbols, header announces " +
                                    std::to_string(need),
                                hdr.corrected, 0);

    std::vector<std::uint8_t> nibbles(h.begin() + kHeaderNibbles, h.end());
    int corrected = hdr.corrected, failed = 0;
    const int prows = payload_rows(fp);
    const int shift = fp.ldro ? 2 : 0;
    const std::uint32_t pmask = (1u << prows) - 1;
    std::size_t pos = kHeaderSymbols;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::vector<std::uint32_t> v(static_cast<std::size_t>(4 + cr));
        for (auto& x : v) {
            const std::uint32_t s = symbols[pos++];
            x = gray_encode((shift ? (s + 2u) >> 2 : s) & pmask);
        }
        const BlockDecode d = decode_block(v, prows, cr);
        nibbles.insert(nibbles.end(), d.nibbles.begin(), d.nibbles.end());
        corrected += d.corrected;
        failed += d.failed;
    }
    if (failed)
        throw PhyIntegrityError("uncorrectable payload codewords: " + std::to_string(failed), corrected, failed);

    Bytes data(len + (crc_on ? 2 : 0));
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = static_cast<std::uint8_t>(nibbles[2 * i] | (nibbles[2 * i + 1] << 4));

    RecoverResult r;
    r.cr = cr;
    r.crc_on = crc_on;
    r.corrected = corrected;
    r.symbols_used = need;
    r.payload.bytes = whiten(ByteView(data.data(), len));
    if (crc_on) {
        const std::uint16_t rx = static_cast<std::uint16_t>(data[len] << 8 | data[len + 1]);
        r.payload.crc16 = rx;
        r.crc_ok = crc16(r.payload.bytes) == rx;
    } else {
        r.crc_ok = true;
    }
    return r;
}

RecoverResult phy_recover(const SymbolBlock& block, const PhyParams& p)
{
    return phy_recover(std::span<const std::uint16_t>(block.symbols), p);
}

}  // namespace olrw::phy
