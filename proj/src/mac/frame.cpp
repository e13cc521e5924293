/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/mac/frame.hpp"

#include <cstdio>

#include "olrw/common/error.hpp"
#include "olrw/config/constants.hpp"

namespace olrw::mac {

bool is_uplink(MType t) { return t == MType::UnconfirmedUp || t == MType::ConfirmedUp; }
bool is_downlink(MType t) { return t == MType::UnconfirmedDown || t == MType::ConfirmedDown; }

namespace {

void put_le32(Bytes& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_le32(ByteView b, std::size_t at)
{
    return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
           static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

Block counter_block(std::uint8_t tag, LinkDir dir, std::uint32_t dev_addr, std::uint32_t fcnt, std::uint8_t last)
{
    Block b{};
    b[0] = tag;
    b[5] = static_cast<std::uint8_t>(dir);
    for (int i = 0; i < 4; ++i) {
        b[6 + i] = static_cast<std::uint8_t>(dev_addr >> (8 * i));
        b[10 + i] = static_cast<std::uint8_t>(fcnt >> (8 * i));
    }
    b[15] = last;
    return b;
}

}  // namespace

Bytes mic_message(const MacFrame& f)
{
    if (f.fopts.size() > kMaxFOpts)
        raise(ErrorKind::Range, "FOpts of " + std::to_string(f.fopts.size()) + " octets exceeds 15");
    if (!f.fport && !f.frm_payload.empty())
        raise(ErrorKind::Validation, "FRMPayload present without FPort");
    Bytes out;
    out.reserve(kMinFrameOctets + f.fopts.size() + 1 + f.frm_payload.size());
    out.push_back(static_cast<std::uint8_t>(static_cast<unsigned>(f.mtype) << 5 | (f.rfu & 7u) << 2 | (f.major & 3u)));
    put_le32(out, f.dev_addr);
    out.push_back(static_cast<std::uint8_t>((f.fctrl.adr ? 0x80 : 0) | (f.fctrl.adr_ack_req ? 0x40 : 0) |
                                            (f.fctrl.ack ? 0x20 : 0) | (f.fctrl.fpending ? 0x10 : 0) |
                                            f.fopts.size()));
    out.push_back(static_cast<std::uint8_t>(f.fcnt));
    out.push_back(static_cast<std::uint8_t>(f.fcnt >> 8));
    out.insert(out.end(), f.fopts.begin(), f.fopts.end());
    if (f.fport) {
        out.push_back(*f.fport);
        out.insert(out.end(), f.frm_payload.begin(), f.frm_payload.end());
    }
    return out;
}

Bytes encode_mac(const MacFrame& f)
{
    Bytes out = mic_message(f);
    put_le32(out, f.mic);
    return out;
}

MacFrame parse_mac(ByteView b)
{
    if (b.size() < kMinFrameOctets)
        raise(ErrorKind::Parse, "MAC frame of " + std::to_string(b.size()) + " octets is shorter than 12");
    MacFrame f;
    f.mtype = static_cast<MType>(b[0] >> 5);
    f.rfu = static_cast<std::uint8_t>(b[0] >> 2 & 7u);
    f.major = static_cast<std::uint8_t>(b[0] & 3u);
    if (!is_uplink(f.mtype) && !is_downlink(f.mtype))
        raise(ErrorKind::Parse, "MType " + std::to_string(static_cast<int>(f.mtype)) + " is not a data frame");
    if (f.major != 0)
        raise(ErrorKind::Parse, "unsupported major version " + std::to_string(f.major));
    f.dev_addr = get_le32(b, 1);
    const std::uint8_t fctrl = b[5];
    f.fctrl.adr = fctrl & 0x80;
    f.fctrl.adr_ack_req = fctrl & 0x40;
    f.fctrl.ack = fctrl & 0x20;
    f.fctrl.fpending = fctrl & 0x10;
    const std::size_t fopts_len = fctrl & 0x0F;
    f.fcnt = static_cast<std::uint16_t>(b[6] | b[7] << 8);
    const std::size_t body_end = b.size() - 4;
    if (8 + fopts_len > body_end)
        raise(ErrorKind::Parse, "FOptsLen " + std::to_string(fopts_len) + " overruns the frame at offset 8");
    f.fopts.assign(b.begin() + 8, b.begin() + static_cast<std::ptrdiff_t>(8 + fopts_len));
    std::size_t pos = 8 + fopts_len;
    if (pos < body_end) {
        f.fport = b[pos++];
        if (*f.fport == 0 && fopts_len > 0)
            raise(ErrorKind::Parse, "FPort 0 with non-empty FOpts");
        f.frm_payload.assign(b.begin() + static_cast<std::ptrdiff_t>(pos), b.begin() + static_cast<std::ptrdiff_t>(body_end));
    }
    f.mic = get_le32(b, body_end);
    return f;
}

std::string dev_addr_hex(std::uint32_t dev_addr)
{
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", dev_addr);
    return buf;
}

std::uint32_t dev_addr_from_hex(std::string_view hex)
{
    if (hex.size() != 8)
        raise(ErrorKind::Validation, "device address must be 8 hex digits: " + std::string(hex));
    const Bytes b = from_hex(hex);
    return static_cast<std::uint32_t>(b[0]) << 24 | static_cast<std::uint32_t>(b[1]) << 16 |
           static_cast<std::uint32_t>(b[2]) << 8 | b[3];
}

Bytes encrypt_payload(const Key& key, LinkDir dir, std::uint32_t dev_addr, std::uint32_t fcnt, ByteView payload)
{
    Bytes out(payload.begin(), payload.end());
    for (std::size_t i = 0; i < out.size(); i += 16) {
        const Block s = aes128_encrypt(key, counter_block(0x01, dir, dev_addr, fcnt, static_cast<std::uint8_t>(i / 16 + 1)));
        for (std::size_t j = 0; j < 16 && i + j < out.size(); ++j)
            out[i + j] ^= s[j];
    }
    return out;
}

const Key& payload_key(const DeviceSession& s, std::uint8_t fport)
{
    return fport == 0 ? s.nwk_skey : s.app_skey;
}

std::uint32_t compute_mic(const Key& nwk_skey, LinkDir dir, std::uint32_t dev_addr, std::uint32_t fcnt, ByteView msg)
{
    if (msg.size() > 255)
        raise(ErrorKind::Range, "MIC message of " + std::to_string(msg.size()) + " octets exceeds 255");
    const Block b0 = counter_block(0x49, dir, dev_addr, fcnt, static_cast<std::uint8_t>(msg.size()));
    Bytes full(b0.begin(), b0.end());
    full.insert(full.end(), msg.begin(), msg.end());
    const Block cmac = aes_cmac(nwk_skey, full);
    return get_le32(ByteView(cmac.data(), cmac.size()), 0);
}

std::size_t max_app_payload(int sf)
{
    if (sf < config::kMinSf || sf > config::kMaxSf)
        raise(ErrorKind::Range, "spreading factor " + std::to_string(sf) + " outside 7..12");
    return static_cast<std::size_t>(config::constants().max_app_payload_octets[sf]);
}

namespace {

Bytes build(DeviceSession& s, LinkDir dir, std::uint8_t fport, ByteView payload, int sf, const TxOptions& opt)
{
    if (payload.size() > max_app_payload(sf))
        raise(ErrorKind::Range, "application payload of " + std::to_string(payload.size()) + " octets exceeds " +
                                    std::to_string(max_app_payload(sf)) + " at sf" + std::to_string(sf));
    if (opt.fopts.size() > kMaxFOpts)
        raise(ErrorKind::Range, "FOpts of " + std::to_string(opt.fopts.size()) + " octets exceeds 15");
    if (fport == 0 && !opt.fopts.empty() && !payload.empty())
        raise(ErrorKind::Validation, "port 0 cannot carry FOpts");
    if (fport >= 224 && !payload.empty())
        raise(ErrorKind::Range, "FPort " + std::to_string(fport) + " is reserved");

    std::uint32_t& counter = dir == LinkDir::Up ? s.fcnt_up : s.fcnt_down;
    MacFrame f;
    if (dir == LinkDir::Up)
        f.mtype = opt.confirmed ? MType::ConfirmedUp : MType::UnconfirmedUp;
    else
        f.mtype = opt.confirmed ? MType::ConfirmedDown : MType::UnconfirmedDown;
    f.dev_addr = s.dev_addr;
    f.fctrl.adr = opt.adr;
    f.fctrl.ack = opt.ack;
    f.fctrl.fpending = opt.fpending;
    f.fcnt = static_cast<std::uint16_t>(counter);
    f.fopts = opt.fopts;
    if (!payload.empty()) {
        f.fport = fport;
        f.frm_payload = encrypt_payload(payload_key(s, fport), dir, s.dev_addr, counter, payload);
    }
    f.mic = compute_mic(s.nwk_skey, dir, s.dev_addr, counter, mic_message(f));
    ++counter;
    return encode_mac(f);
}

}  // namespace

Bytes build_uplink(DeviceSession& session, std::uint8_t fport, ByteView app_payload, int sf, const TxOptions& opt)
{
    return build(session, LinkDir::Up, fport, app_payload, sf, opt);
}

Bytes build_downlink(DeviceSession& session, std::uint8_t fport, ByteView app_payload, int sf, const TxOptions& opt)
{
    return build(session, LinkDir::Down, fport, app_payload, sf, opt);
}

std::optional<std::uint32_t> extend_fcnt(std::uint32_t expected, std::uint16_t received)
{
    const std::uint16_t gap = static_cast<std::uint16_t>(received - static_cast<std::uint16_t>(expected));
    if (gap >= 0x10000u - kReplayWindow)
        return std::nullopt;
    return expected + gap;
}

Verified parse_and_verify(ByteView bytes, const DeviceSession& session)
{
    Verified v;
    v.frame = parse_mac(bytes);
    const bool up = is_uplink(v.frame.mtype);
    const LinkDir dir = up ? LinkDir::Up : LinkDir::Down;
    const std::uint32_t expected = up ? session.fcnt_up : session.fcnt_down;
    const auto ext = extend_fcnt(expected, v.frame.fcnt);
    v.fcnt_ok = ext.has_value() && v.frame.dev_addr == session.dev_addr;
    // A replayed counter still gets a MIC check at its nearest 32-bit value.
    v.fcnt32 = ext ? *ext : (expected & 0xFFFF0000u) | v.frame.fcnt;
    if (!ext && v.fcnt32 > expected)
        v.fcnt32 -= 0x10000u;
    const ByteView msg = bytes.first(bytes.size() - 4);
    v.mic_ok = v.frame.dev_addr == session.dev_addr &&
               compute_mic(session.nwk_skey, dir, session.dev_addr, v.fcnt32, msg) == v.frame.mic;
    return v;
}

void accept_frame(DeviceSession& session, const Verified& v)
{
    if (!v.mic_ok || !v.fcnt_ok)
        raise(ErrorKind::State, "cannot accept a frame that failed verification");
    std::uint32_t& counter = is_uplink(v.frame.mtype) ? session.fcnt_up : session.fcnt_down;
    counter = v.fcnt32 + 1;
}

Bytes frame_plaintext(const DeviceSession& session, const Verified& v)
{
    if (!v.frame.fport)
        return {};
    const LinkDir dir = is_uplink(v.frame.mtype) ? LinkDir::Up : LinkDir::Down;
    return decrypt_payload(payload_key(session, *v.frame.fport), dir, session.dev_addr, v.fcnt32, v.frame.frm_payload);
}

int data_rate_of_sf(int sf)
{
    if (sf < 7 || sf > 12)
        raise(ErrorKind::Range, "spreading factor " + std::to_string(sf) + " has no data rate");
    return 12 - sf;
}

int sf_of_data_rate(int dr)
{
    if (dr < 0 || dr > 5)
        raise(ErrorKind::Range, "data rate " + std::to_string(dr) + " outside DR0..DR5");
    return 12 - dr;
}

int power_index_of(int tx_power_dbm)
{
    if (tx_power_dbm > 14 || tx_power_dbm < 0 || tx_power_dbm % 2 != 0)
        raise(ErrorKind::Range, "tx power " + std::to_string(tx_power_dbm) + " dBm has no power index");
    return (14 - tx_power_dbm) / 2;
}

int power_of_index(int index)
{
    if (index < 0 || index > 7)
        raise(ErrorKind::Range, "power index " + std::to_string(index) + " outside 0..7");
    return 14 - 2 * index;
}

Bytes encode_link_adr_req(const LinkAdrReq& r)
{
    return Bytes{kCidLinkAdr,
                 static_cast<std::uint8_t>(data_rate_of_sf(r.sf) << 4 | power_index_of(r.tx_power_dbm)),
                 static_cast<std::uint8_t>(r.ch_mask), static_cast<std::uint8_t>(r.ch_mask >> 8),
                 static_cast<std::uint8_t>(r.nb_trans & 0x0F)};
}

std::vector<LinkAdrReq> decode_downlink_commands(ByteView fopts)
{
    std::vector<LinkAdrReq> out;
    std::size_t i = 0;
    while (i < fopts.size()) {
        if (fopts[i] != kCidLinkAdr)
            raise(ErrorKind::Parse, "unsupported MAC command 0x" + to_hex(fopts.subspan(i, 1)) + " at offset " +
                                        std::to_string(i));
        if (i + 5 > fopts.size())
            raise(ErrorKind::Parse, "truncated LinkADRReq at offset " + std::to_string(i));
        LinkAdrReq r;
        r.sf = sf_of_data_rate(fopts[i + 1] >> 4);
        r.tx_power_dbm = power_of_index(fopts[i + 1] & 0x0F);
        r.ch_mask = static_cast<std::uint16_t>(fopts[i + 2] | fopts[i + 3] << 8);
        r.nb_trans = fopts[i + 4] & 0x0F;
        out.push_back(r);
        i += 5;
    }
    return out;
}

Bytes encode_link_adr_ans(bool power_ok, bool dr_ok, bool mask_ok)
{
    return Bytes{kCidLinkAdr, static_cast<std::uint8_t>((power_ok ? 4 : 0) | (dr_ok ? 2 : 0) | (mask_ok ? 1 : 0))};
}

std::vector<std::uint8_t> decode_uplink_commands(ByteView fopts)
{
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < fopts.size(); i += 2) {
        if (fopts[i] != kCidLinkAdr)
            raise(ErrorKind::Parse, "unsupported MAC command 0x" + to_hex(fopts.subspan(i, 1)) + " at offset " +
                                        std::to_string(i));
        if (i + 2 > fopts.size())
            raise(ErrorKind::Parse, "truncated LinkADRAns at offset " + std::to_string(i));
        out.push_back(fopts[i + 1]);
    }
    return out;
}

}  // namespace olrw::mac
