/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/mac/crypto.hpp"

#include <openssl/evp.h>

#include <memory>

#include "olrw/common/error.hpp"

namespace olrw::mac {

Key key_from_hex(std::string_view hex)
{
    if (hex.size() != 32)
        raise(ErrorKind::Validation, "key must be 128 bits (32 hex digits), got " + std::to_string(hex.size()));
    Bytes b;
    try {
        b = from_hex(hex);
    } catch (const Error& e) {
        raise(ErrorKind::Validation, std::string("key: ") + e.what());
    }
    Key k{};
    std::copy(b.begin(), b.end(), k.begin());
    return k;
}

Block aes128_encrypt(const Key& key, const Block& in)
{
    std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1)
        raise(ErrorKind::State, "AES context initialization failed");
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    Block out{};
    int len = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, in.data(), static_cast<int>(in.size())) != 1 || len != 16)
        raise(ErrorKind::State, "AES block encryption failed");
    return out;
}

namespace {

Block double_block(const Block& b)
{
    Block out{};
    for (std::size_t i = 0; i < 16; ++i)
        out[i] = static_cast<std::uint8_t>(b[i] << 1 | (i + 1 < 16 ? b[i + 1] >> 7 : 0));
    if (b[0] & 0x80)
        out[15] ^= 0x87;
    return out;
}

}  // namespace

Block aes_cmac(const Key& key, ByteView msg)
{
    const Block l = aes128_encrypt(key, Block{});
    const Block k1 = double_block(l);
    const Block k2 = double_block(k1);

    const std::size_t n = msg.empty() ? 1 : (msg.size() + 15) / 16;
    const bool complete = !msg.empty() && msg.size() % 16 == 0;

    Block x{};
    for (std::size_t blk = 0; blk + 1 < n; ++blk) {
        for (std::size_t i = 0; i < 16; ++i)
            x[i] ^= msg[blk * 16 + i];
        x = aes128_encrypt(key, x);
    }
    Block last{};
    const std::size_t off = (n - 1) * 16;
    const std::size_t rem = msg.size() - off;
    for (std::size_t i = 0; i < rem; ++i)
        last[i] = msg[off + i];
    if (complete) {
        for (std::size_t i = 0; i < 16; ++i)
            last[i] ^= k1[i];
    } else {
        last[rem] = 0x80;
        for (std::size_t i = 0; i < 16; ++i)
            last[i] ^= k2[i];
    }
    for (std::size_t i = 0; i < 16; ++i)
        x[i] ^= last[i];
    return aes128_encrypt(key, x);
}

}  // namespace olrw::mac
