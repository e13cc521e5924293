/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "olrw/common/bytes.hpp"

namespace olrw::mac {

using Key = std::array<std::uint8_t, 16>;
using Block = std::array<std::uint8_t, 16>;

/// Parses 32 hex digits; anything else throws Validation.
Key key_from_hex(std::string_view hex);

/// Single-block AES-128 encryption.
Block aes128_encrypt(const Key& key, const Block& in);

/// AES-CMAC (RFC 4493) over an arbitrary message.
Block aes_cmac(const Key& key, ByteView msg);

}  // namespace olrw::mac
