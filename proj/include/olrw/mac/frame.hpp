/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "olrw/common/bytes.hpp"
#include "olrw/mac/crypto.hpp"

namespace olrw::mac {

enum class MType : std::uint8_t {
    JoinRequest = 0,
    JoinAccept = 1,
    UnconfirmedUp = 2,
    UnconfirmedDown = 3,
    ConfirmedUp = 4,
    ConfirmedDown = 5,
    Rfu = 6,
    Proprietary = 7,
};

enum class LinkDir : std::uint8_t { Up = 0, Down = 1 };

enum class DeviceClass : std::uint8_t { A = 0, B = 1, C = 2 };

bool is_uplink(MType t);
bool is_downlink(MType t);

struct FCtrl {
    bool adr = false;
    bool adr_ack_req = false;  // uplink only; the same bit is RFU downlink
    bool ack = false;
    bool fpending = false;  // downlink FPending, uplink ClassB

    bool operator==(const FCtrl&) const = default;
};

/// Octet layout (multi-octet fields little-endian, as on air):
///   MHDR(1) DevAddr(4) FCtrl(1) FCnt(2) FOpts(0..15) [FPort(1) FRMPayload(n)] MIC(4)
/// MHDR: MType(3) RFU(3) Major(2). FCtrl: ADR, ADRACKReq/RFU, ACK, FPending/ClassB, FOptsLen(4).
struct MacFrame {
    MType mtype = MType::UnconfirmedUp;
    std::uint8_t rfu = 0;
    std::uint8_t major = 0;
    std::uint32_t dev_addr = 0;
    FCtrl fctrl;
    std::uint16_t fcnt = 0;
    Bytes fopts;
    std::optional<std::uint8_t> fport;
    Bytes frm_payload;  // as carried, i.e. encrypted
    std::uint32_t mic = 0;

    bool operator==(const MacFrame&) const = default;
};

constexpr std::size_t kMinFrameOctets = 12;
constexpr std::size_t kMaxFOpts = 15;

Bytes encode_mac(const MacFrame& f);

/// Structural parse. Short or inconsistent input throws Parse.
MacFrame parse_mac(ByteView bytes);

/// Octets covered by the MIC (everything but the last four).
Bytes mic_message(const MacFrame& f);

struct DeviceSession {
    std::uint32_t dev_addr = 0;
    Key nwk_skey{};
    Key app_skey{};
    /// Next counter to send (device side) or the next one expected (network side).
    std::uint32_t fcnt_up = 0;
    std::uint32_t fcnt_down = 0;
    DeviceClass device_class = DeviceClass::A;

    bool operator==(const DeviceSession&) const = default;
};

std::string dev_addr_hex(std::uint32_t dev_addr);
std::uint32_t dev_addr_from_hex(std::string_view hex);

/// Counter-block keystream XOR; applying it twice is the identity.
Bytes encrypt_payload(const Key& key, LinkDir dir, std::uint32_t dev_addr, std::uint32_t fcnt, ByteView payload);
inline Bytes decrypt_payload(const Key& key, LinkDir dir, std::uint32_t dev_addr, std::uint32_t fcnt, ByteView payload)
{
    return encrypt_payload(key, dir, dev_addr, fcnt, payload);
}

/// FRMPayload key for a port: NwkSKey on port 0, AppSKey otherwise.
const Key& payload_key(const DeviceSession& s, std::uint8_t fport);

/// Four-octet CMAC over the B0 block and the frame, read little-endian from the
/// first four CMAC octets.
std::uint32_t compute_mic(const Key& nwk_skey, LinkDir dir, std::uint32_t dev_addr, std::uint32_t fcnt,
                          ByteView msg);

struct TxOptions {
    bool confirmed = false;
    bool adr = false;
    bool ack = false;
    bool fpending = false;
    Bytes fopts;
};

/// Largest application payload for a spreading factor.
std::size_t max_app_payload(int sf);

/// Builds, encrypts and signs an uplink at session.fcnt_up, then advances the counter.
/// Payload plus FOpts above the sf limit throws Range.
Bytes build_uplink(DeviceSession& session, std::uint8_t fport, ByteView app_payload, int sf,
                   const TxOptions& opt = {});

/// Mirror of build_uplink with fcnt_down and the downlink direction.
Bytes build_downlink(DeviceSession& session, std::uint8_t fport, ByteView app_payload, int sf,
                     const TxOptions& opt = {});

struct Verified {
    MacFrame frame;
    bool mic_ok = false;
    bool fcnt_ok = false;
    std::uint32_t fcnt32 = 0;  // 16-bit counter extended against the session
};

/// Counters this far behind the expected value are treated as replays; every other
/// 16-bit value is taken as a forward gap (with rollover into the upper half).
constexpr std::uint32_t kReplayWindow = 128;

/// Extends a received 16-bit counter against the next expected 32-bit value.
/// Returns nullopt for a replay.
std::optional<std::uint32_t> extend_fcnt(std::uint32_t expected, std::uint16_t received);

/// Parses and verifies without touching the session. Direction follows the MType.
Verified parse_and_verify(ByteView bytes, const DeviceSession& session);

/// Advances the matching counter past an accepted frame.
void accept_frame(DeviceSession& session, const Verified& v);

/// Decrypted FRMPayload of a verified frame.
Bytes frame_plaintext(const DeviceSession& session, const Verified& v);

// MAC commands carried in FOpts.

constexpr std::uint8_t kCidLinkAdr = 0x03;

struct LinkAdrReq {
    int sf = 12;
    int tx_power_dbm = 14;
    std::uint16_t ch_mask = 0x0007;
    std::uint8_t nb_trans = 1;

    bool operator==(const LinkAdrReq&) const = default;
};

/// DR0..DR5 map to sf12..sf7; power index i maps to 14 - 2i dBm.
int data_rate_of_sf(int sf);
int sf_of_data_rate(int dr);
int power_index_of(int tx_power_dbm);
int power_of_index(int index);

Bytes encode_link_adr_req(const LinkAdrReq& r);
/// Decodes downlink FOpts. Unknown command ids throw Parse.
std::vector<LinkAdrReq> decode_downlink_commands(ByteView fopts);

/// LinkADRAns: power, data rate and channel mask acknowledgement bits.
Bytes encode_link_adr_ans(bool power_ok, bool dr_ok, bool mask_ok);
/// Decodes uplink FOpts into LinkADRAns status octets.
std::vector<std::uint8_t> decode_uplink_commands(ByteView fopts);

}  // namespace olrw::mac
