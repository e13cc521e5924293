/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/common/bytes.hpp"

#include "olrw/common/error.hpp"

namespace olrw {

std::string to_hex(ByteView data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 2);
    for (auto b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

Bytes from_hex(std::string_view hex)
{
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0)
        raise(ErrorKind::Parse, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            raise(ErrorKind::Parse, "invalid hex digit");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

void ByteWriter::u16(std::uint16_t v)
{
    flush_bits();
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v)
{
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
}

void ByteWriter::u64(std::uint64_t v)
{
    u32(static_cast<std::uint32_t>(v >> 32));
    u32(static_cast<std::uint32_t>(v));
}

void ByteWriter::bytes(ByteView v)
{
    flush_bits();
    out_.insert(out_.end(), v.begin(), v.end());
}

void ByteWriter::bits(std::uint32_t v, unsigned width)
{
    for (unsigned i = width; i-- > 0;) {
        acc_ = acc_ << 1 | ((v >> i) & 1u);
        if (++acc_bits_ == 8) {
            out_.push_back(static_cast<std::uint8_t>(acc_));
            acc_ = 0;
            acc_bits_ = 0;
        }
    }
}

void ByteWriter::flush_bits()
{
    if (acc_bits_ == 0)
        return;
    out_.push_back(static_cast<std::uint8_t>(acc_ << (8 - acc_bits_)));
    acc_ = 0;
    acc_bits_ = 0;
}

void ByteReader::need(std::size_t n) const
{
    if (data_.size() - pos_ < n)
        raise(ErrorKind::Length, "truncated input at offset " + std::to_string(pos_) + " (need " +
                                     std::to_string(n) + " octets, have " +
                                     std::to_string(data_.size() - pos_) + ")");
}

std::uint8_t ByteReader::u8()
{
    align();
    need(1);
    return data_[pos_++];
}

std::uint16_t ByteReader::u16()
{
    align();
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
    pos_ += 2;
    return v;
}

std::uint32_t ByteReader::u32()
{
    std::uint32_t hi = u16();
    return hi << 16 | u16();
}

std::uint64_t ByteReader::u64()
{
    std::uint64_t hi = u32();
    return hi << 32 | u32();
}

ByteView ByteReader::bytes(std::size_t n)
{
    align();
    need(n);
    auto v = data_.subspan(pos_, n);
    pos_ += n;
    return v;
}

std::uint32_t ByteReader::bits(unsigned width)
{
    std::uint32_t v = 0;
    for (unsigned i = 0; i < width; ++i) {
        need(1);
        v = v << 1 | ((data_[pos_] >> (7 - bit_pos_)) & 1u);
        if (++bit_pos_ == 8) {
            bit_pos_ = 0;
            ++pos_;
        }
    }
    return v;
}

void ByteReader::align()
{
    if (bit_pos_ == 0)
        return;
    std::uint8_t mask = static_cast<std::uint8_t>(0xFFu >> bit_pos_);
    if (data_[pos_] & mask)
        raise(ErrorKind::Format, "nonzero padding bits at offset " + std::to_string(pos_));
    bit_pos_ = 0;
    ++pos_;
}

}  // namespace olrw
