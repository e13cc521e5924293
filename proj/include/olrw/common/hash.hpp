/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace olrw {

/// FNV-1a, used for dedup keys and report digests (not for security).
constexpr std::uint64_t fnv1a(std::span<const std::uint8_t> data, std::uint64_t h = 0xCBF29CE484222325ull)
{
    for (auto b : data) {
        h ^= b;
        h *= 0x100000001B3ull;
    }
    return h;
}

constexpr std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ull)
{
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace olrw
