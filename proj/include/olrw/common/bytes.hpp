/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace olrw {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

/// Big-endian octet writer with an MSB-first bit accumulator for sub-octet fields.
class ByteWriter {
public:
    void u8(std::uint8_t v) { flush_bits(); out_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void bytes(ByteView v);

    /// Appends the low `width` bits of `v`, MSB first.
    void bits(std::uint32_t v, unsigned width);
    /// Zero-pads any partial octet.
    void flush_bits();

    std::size_t size() const { return out_.size(); }
    const Bytes& data() const { return out_; }
    Bytes take() { flush_bits(); return std::move(out_); }

private:
    Bytes out_;
    std::uint32_t acc_ = 0;
    unsigned acc_bits_ = 0;
};

/// Counterpart of ByteWriter; throws Length on truncation and Format on nonzero padding.
class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    ByteView bytes(std::size_t n);

    std::uint32_t bits(unsigned width);
    /// Discards the rest of a partially consumed octet; the padding must be zero.
    void align();

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool at_end() const { return pos_ == data_.size() && bit_pos_ == 0; }

private:
    void need(std::size_t n) const;

    ByteView data_;
    std::size_t pos_ = 0;
    unsigned bit_pos_ = 0;
};

}  // namespace olrw
