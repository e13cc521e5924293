/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <openssl/core_names.h>
#include <openssl/evp.h>

#include <set>

#include "doctest.h"
#include "olrw/common/error.hpp"
#include "olrw/common/rng.hpp"
#include "olrw/mac/frame.hpp"

using namespace olrw;
using namespace olrw::mac;

namespace {

// Independent CMAC: OpenSSL's EVP_MAC implementation.
Block openssl_cmac(const Key& key, ByteView msg)
{
    EVP_MAC* mac = EVP_MAC_fetch(nullptr, "CMAC", nullptr);
    EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(mac);
    char cipher[] = "AES-128-CBC";
    OSSL_PARAM params[] = {OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_CIPHER, cipher, 0), OSSL_PARAM_construct_end()};
    EVP_MAC_init(ctx, key.data(), key.size(), params);
    EVP_MAC_update(ctx, msg.data(), msg.size());
    Block out{};
    std::size_t len = 0;
    EVP_MAC_final(ctx, out.data(), &len, out.size());
    EVP_MAC_CTX_free(ctx);
    EVP_MAC_free(mac);
    return out;
}

std::string hex(const Block& b) { return to_hex(ByteView(b.data(), b.size())); }

DeviceSession golden_session()
{
    DeviceSession s;
    s.dev_addr = 0x26011BDA;
    s.nwk_skey = key_from_hex("2b7e151628aed2a6abf7158809cf4f3c");
    s.app_skey = key_from_hex("000102030405060708090a0b0c0d0e0f");
    s.fcnt_up = 1;
    s.fcnt_down = 1;
    return s;
}

Bytes text(std::string_view s) { return Bytes(s.begin(), s.end()); }

}  // namespace

TEST_CASE("AES-128 single block vector")
{
    const Key k = key_from_hex("000102030405060708090a0b0c0d0e0f");
    Block pt{};
    const Bytes p = from_hex("00112233445566778899aabbccddeeff");
    std::copy(p.begin(), p.end(), pt.begin());
    CHECK(hex(aes128_encrypt(k, pt)) == "69c4e0d86a7b0430d8cdb78070b4c55a");
}

TEST_CASE("CMAC published vectors")
{
    const Key k = key_from_hex("2b7e151628aed2a6abf7158809cf4f3c");
    const Bytes m = from_hex("6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
                             "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710");
    CHECK(hex(aes_cmac(k, ByteView{})) == "bb1d6929e95937287fa37d129b756746");
    CHECK(hex(aes_cmac(k, ByteView(m).first(16))) == "070a16b46b4d4144f79bdd9dd04a287c");
    CHECK(hex(aes_cmac(k, ByteView(m).first(40))) == "dfa66747de9ae63030ca32611497c827");
    CHECK(hex(aes_cmac(k, m)) == "51f0bebf7e3b9d92fc49741779363cfe");
}

TEST_CASE("CMAC agrees with an independent implementation at every length")
{
    Rng rng(5);
    for (std::size_t len = 0; len <= 80; ++len) {
        Key k;
        for (auto& b : k)
            b = static_cast<std::uint8_t>(rng());
        Bytes m(len);
        for (auto& b : m)
            b = static_cast<std::uint8_t>(rng());
        CHECK(hex(aes_cmac(k, m)) == hex(openssl_cmac(k, m)));
    }
}

TEST_CASE("golden uplink and downlink frames")
{
    auto s = golden_session();
    const Bytes up = build_uplink(s, 1, text("hello world!"), 7, TxOptions{.adr = true});
    CHECK(to_hex(up) == "40da1b012680010001ba96c8f0fc81dca8e1f71e5c689ac1a2");
    CHECK(s.fcnt_up == 2);
    const Bytes dn = build_downlink(s, 1, text("hello world!"), 7, TxOptions{.adr = true});
    CHECK(to_hex(dn) == "60da1b0126800100010ad11a1c27524184b9fb270bc09ae336");
    CHECK(s.fcnt_down == 2);
    // Same payload, key and counter; only the direction octet differs.
    CHECK(parse_mac(up).mic != parse_mac(dn).mic);
}

TEST_CASE("uplink round trip")
{
    auto dev = golden_session();
    auto ns = dev;
    Rng rng(11);
    for (int n = 0; n < 300; ++n) {
        Bytes p(rng() % 52);
        for (auto& b : p)
            b = static_cast<std::uint8_t>(rng());
        TxOptions o;
        o.confirmed = rng() & 1;
        o.adr = rng() & 1;
        o.ack = rng() & 1;
        if (rng() & 1)
            o.fopts = encode_link_adr_ans(true, rng() & 1, true);
        const std::uint8_t port = static_cast<std::uint8_t>(1 + rng() % 200);
        const Bytes f = build_uplink(dev, port, p, 12, o);
        const auto v = parse_and_verify(f, ns);
        REQUIRE(v.mic_ok);
        REQUIRE(v.fcnt_ok);
        CHECK(frame_plaintext(ns, v) == p);
        CHECK(v.frame.fctrl.adr == o.adr);
        CHECK(v.frame.fctrl.ack == o.ack);
        CHECK(v.frame.mtype == (o.confirmed ? MType::ConfirmedUp : MType::UnconfirmedUp));
        CHECK(v.frame.fopts == o.fopts);
        CHECK(v.frame.fport.has_value() == !p.empty());
        CHECK(encode_mac(v.frame) == f);
        accept_frame(ns, v);
        CHECK(ns.fcnt_up == dev.fcnt_up);
    }
}

TEST_CASE("empty payload frame")
{
    auto s = golden_session();
    auto ns = s;
    const Bytes f = build_uplink(s, 1, ByteView{}, 7);
    CHECK(f.size() == kMinFrameOctets);
    const auto v = parse_and_verify(f, ns);
    CHECK_FALSE(v.frame.fport.has_value());
    CHECK(v.mic_ok);
    CHECK(frame_plaintext(ns, v).empty());
}

TEST_CASE("every single-bit tamper is rejected")
{
    auto s = golden_session();
    const auto ns = s;
    const Bytes p = text("0123456789ab");
    REQUIRE(p.size() == 12);
    const Bytes f = build_uplink(s, 7, p, 7);
    int rejected = 0, flips = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (int bit = 0; bit < 8; ++bit) {
            Bytes t = f;
            t[i] ^= static_cast<std::uint8_t>(1u << bit);
            ++flips;
            try {
                const auto v = parse_and_verify(t, ns);
                if (!v.mic_ok)
                    ++rejected;
            } catch (const Error&) {
                ++rejected;
            }
        }
    }
    CHECK(rejected == flips);
}

TEST_CASE("wrong-key forgeries are rejected")
{
    auto s = golden_session();
    const auto ns = s;
    Rng rng(1234);
    int passes = 0;
    for (int n = 0; n < 10000; ++n) {
        DeviceSession forger = ns;
        for (auto& b : forger.nwk_skey)
            b = static_cast<std::uint8_t>(rng());
        Bytes p(1 + rng() % 20);
        for (auto& b : p)
            b = static_cast<std::uint8_t>(rng());
        const Bytes f = build_uplink(forger, 1, p, 7);
        if (parse_and_verify(f, ns).mic_ok)
            ++passes;
    }
    CHECK(passes == 0);
}

TEST_CASE("counter-mode keystream")
{
    const auto s = golden_session();
    const Bytes zero(40, 0);
    const Bytes ks = encrypt_payload(s.app_skey, LinkDir::Up, s.dev_addr, 9, zero);
    Rng rng(8);
    for (int n = 0; n < 50; ++n) {
        Bytes p(40);
        for (auto& b : p)
            b = static_cast<std::uint8_t>(rng());
        const Bytes c = encrypt_payload(s.app_skey, LinkDir::Up, s.dev_addr, 9, p);
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK((c[i] ^ p[i]) == ks[i]);
        CHECK(decrypt_payload(s.app_skey, LinkDir::Up, s.dev_addr, 9, c) == p);
    }
    CHECK(encrypt_payload(s.app_skey, LinkDir::Up, s.dev_addr, 9, ByteView{}).empty());
    const Bytes ks10 = encrypt_payload(s.app_skey, LinkDir::Up, s.dev_addr, 10, zero);
    CHECK(ks10 != ks);
    // Blocks of one keystream are distinct (different counter octet).
    CHECK(!std::equal(ks.begin(), ks.begin() + 16, ks.begin() + 16));
}

TEST_CASE("frame counters")
{
    CHECK(extend_fcnt(0, 0) == 0u);
    CHECK(extend_fcnt(5, 7) == 7u);
    CHECK(extend_fcnt(0xFFFF, 0) == 0x10000u);
    CHECK(extend_fcnt(0x1FFF0, 0x0002) == 0x20002u);
    CHECK_FALSE(extend_fcnt(10, 9).has_value());
    CHECK_FALSE(extend_fcnt(200, 200 - 128).has_value());
    CHECK(extend_fcnt(200, 200 - 129) == 200u + 0x10000u - 129u);

    auto dev = golden_session();
    auto ns = dev;
    const Bytes f = build_uplink(dev, 1, text("x"), 7);
    auto v = parse_and_verify(f, ns);
    REQUIRE(v.fcnt_ok);
    accept_frame(ns, v);
    v = parse_and_verify(f, ns);
    CHECK(v.mic_ok);
    CHECK_FALSE(v.fcnt_ok);
    CHECK_THROWS_AS(accept_frame(ns, v), Error);

    // Counter rollover past 16 bits keeps verifying.
    dev.fcnt_up = ns.fcnt_up = 0xFFFE;
    for (int i = 0; i < 4; ++i) {
        const auto g = parse_and_verify(build_uplink(dev, 1, text("r"), 7), ns);
        REQUIRE(g.mic_ok);
        REQUIRE(g.fcnt_ok);
        accept_frame(ns, g);
    }
    CHECK(ns.fcnt_up == 0x10002u);
}

TEST_CASE("downlink verified on the device side")
{
    auto ns = golden_session();
    auto dev = ns;
    const Bytes cmd = encode_link_adr_req({9, 10});
    const Bytes f = build_downlink(ns, 0, ByteView{}, 9, TxOptions{.ack = true, .fopts = cmd});
    const auto v = parse_and_verify(f, dev);
    CHECK(v.mic_ok);
    CHECK(v.fcnt_ok);
    CHECK(v.frame.fctrl.ack);
    CHECK(is_downlink(v.frame.mtype));
    const auto cmds = decode_downlink_commands(v.frame.fopts);
    REQUIRE(cmds.size() == 1);
    CHECK(cmds[0].sf == 9);
    CHECK(cmds[0].tx_power_dbm == 10);
    accept_frame(dev, v);
    CHECK(dev.fcnt_down == 2);

    const Bytes g = build_downlink(ns, 1, text("no ack"), 9);
    CHECK_FALSE(parse_mac(g).fctrl.ack);
}

TEST_CASE("MAC command encodings")
{
    CHECK(to_hex(encode_link_adr_req({12, 14})) == "0300070001");
    CHECK(to_hex(encode_link_adr_req({7, 2})) == "0356070001");
    for (int sf = 7; sf <= 12; ++sf)
        CHECK(sf_of_data_rate(data_rate_of_sf(sf)) == sf);
    for (int p = 0; p <= 14; p += 2)
        CHECK(power_of_index(power_index_of(p)) == p);
    CHECK_THROWS_AS(power_index_of(3), Error);
    CHECK_THROWS_AS(decode_downlink_commands(from_hex("05")), Error);
    CHECK_THROWS_AS(decode_downlink_commands(from_hex("0300")), Error);
    CHECK(decode_uplink_commands(encode_link_adr_ans(true, true, true)) == std::vector<std::uint8_t>{7});
}

TEST_CASE("frame grammar and limits")
{
    auto s = golden_session();
    CHECK_THROWS_AS(build_uplink(s, 1, Bytes(223), 7), Error);
    CHECK_NOTHROW(build_uplink(s, 1, Bytes(222), 7));
    CHECK_THROWS_AS(build_uplink(s, 1, Bytes(52), 12), Error);
    CHECK_NOTHROW(build_uplink(s, 1, Bytes(51), 12));
    CHECK_THROWS_AS(build_uplink(s, 1, Bytes(116), 9), Error);
    CHECK_THROWS_AS(build_uplink(s, 1, Bytes(1), 7, TxOptions{.fopts = Bytes(16)}), Error);

    try {
        parse_mac(Bytes(11));
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }
    Bytes f = build_uplink(s, 1, text("abc"), 7);
    Bytes bad = f;
    bad[5] = static_cast<std::uint8_t>((bad[5] & 0xF0) | 0x0F);
    CHECK_THROWS_AS(parse_mac(bad), Error);
    bad = f;
    bad[0] = 0x00;  // join request
    CHECK_THROWS_AS(parse_mac(bad), Error);

    MacFrame m;
    m.mtype = MType::ConfirmedDown;
    m.dev_addr = 0xDEADBEEF;
    m.fctrl = {true, false, true, true};
    m.fcnt = 0xBEEF;
    m.fopts = {3, 0x56, 7, 0, 1};
    m.fport = 9;
    m.frm_payload = {1, 2, 3};
    m.mic = 0x01020304;
    CHECK(parse_mac(encode_mac(m)) == m);
    CHECK(dev_addr_hex(0x0000ABCD) == "0000abcd");
    CHECK(dev_addr_from_hex("26011bda") == 0x26011BDAu);
    CHECK_THROWS_AS(key_from_hex("00"), Error);
}
