/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/fronthaul/codec.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "fields.hpp"
#include "olrw/common/error.hpp"

namespace olrw::fronthaul {
namespace detail {

bool in_header_group(std::size_t i)
{
    switch (i) {
    case kSpreadingFactor:
    case kBandwidth:
    case kLoRaWANVersion:
    case kDataDirection:
    case kPayloadVersion:
    case kSectionId:
    case kSectionOptionsLength:
        return true;
    default:
        return false;
    }
}

namespace {

using S = LoRaWANSection;

template <class T>
FieldOps octet_field(std::optional<T> S::*m)
{
    return {[m](const S& s) { return (s.*m).has_value(); },
            [m](const S& s, ByteWriter& w) { w.u8(static_cast<std::uint8_t>(*(s.*m))); },
            [m](S& s, ByteReader& r) { s.*m = static_cast<T>(r.u8()); }};
}

template <class T>
FieldOps bits_field(std::optional<T> S::*m, unsigned width)
{
    return {[m](const S& s) { return (s.*m).has_value(); },
            [m, width](const S& s, ByteWriter& w) { w.bits(static_cast<std::uint32_t>(*(s.*m)), width); },
            [m, width](S& s, ByteReader& r) { s.*m = static_cast<T>(r.bits(width)); }};
}

FieldOps u16_field(std::optional<std::uint16_t> S::*m)
{
    return {[m](const S& s) { return (s.*m).has_value(); }, [m](const S& s, ByteWriter& w) { w.u16(*(s.*m)); },
            [m](S& s, ByteReader& r) { s.*m = r.u16(); }};
}

FieldOps u32_field(std::optional<std::uint32_t> S::*m)
{
    return {[m](const S& s) { return (s.*m).has_value(); }, [m](const S& s, ByteWriter& w) { w.u32(*(s.*m)); },
            [m](S& s, ByteReader& r) { s.*m = r.u32(); }};
}

FieldOps u64_field(std::optional<std::uint64_t> S::*m)
{
    return {[m](const S& s) { return (s.*m).has_value(); }, [m](const S& s, ByteWriter& w) { w.u64(*(s.*m)); },
            [m](S& s, ByteReader& r) { s.*m = r.u64(); }};
}

FieldOps opaque_field(std::optional<Bytes> S::*m)
{
    return {[m](const S& s) { return (s.*m).has_value(); },
            [m](const S& s, ByteWriter& w) {
                w.u16(static_cast<std::uint16_t>((s.*m)->size()));
                w.bytes(*(s.*m));
            },
            [m](S& s, ByteReader& r) {
                const auto n = r.u16();
                const auto v = r.bytes(n);
                s.*m = Bytes(v.begin(), v.end());
            }};
}

FieldOps float_field(std::optional<std::vector<float>> S::*m)
{
    return {[m](const S& s) { return (s.*m).has_value(); },
            [m](const S& s, ByteWriter& w) {
                w.u16(static_cast<std::uint16_t>((s.*m)->size() * 4));
                for (float f : *(s.*m))
                    w.u32(std::bit_cast<std::uint32_t>(f));
            },
            [m](S& s, ByteReader& r) {
                const std::size_t at = r.offset();
                const auto n = r.u16();
                if (n % 4 != 0)
                    raise(ErrorKind::Format, "sample field length " + std::to_string(n) +
                                                 " not a multiple of 4 at offset " + std::to_string(at));
                std::vector<float> v(n / 4);
                for (auto& f : v)
                    f = std::bit_cast<float>(r.u32());
                s.*m = std::move(v);
            }};
}

std::array<FieldOps, kAttributeCount> make_ops()
{
    std::array<FieldOps, kAttributeCount> ops;
    ops[kISample] = float_field(&S::i_samples);
    ops[kQSample] = float_field(&S::q_samples);
    ops[kDemodInfo] = {[](const S& s) { return s.demodulation_info.has_value(); },
                       [](const S& s, ByteWriter& w) {
                           const auto& d = *s.demodulation_info;
                           w.u16(static_cast<std::uint16_t>(2 + 3 * d.size()));
                           w.u16(static_cast<std::uint16_t>(d.size()));
                           for (const auto& e : d) {
                               w.u16(e.symbol);
                               w.u8(e.metric_q);
                           }
                       },
                       [](S& s, ByteReader& r) {
                           const std::size_t at = r.offset();
                           const auto len = r.u16();
                           if (len < 2)
                               raise(ErrorKind::Format, "demodulation info shorter than its count at offset " +
                                                            std::to_string(at));
                           const auto count = r.u16();
                           if (len != 2 + 3u * count)
                               raise(ErrorKind::Format, "demodulation info length " + std::to_string(len) +
                                                            " disagrees with count " + std::to_string(count) +
                                                            " at offset " + std::to_string(at));
                           std::vector<DemodEntry> d(count);
                           for (auto& e : d) {
                               e.symbol = r.u16();
                               e.metric_q = r.u8();
                           }
                           s.demodulation_info = std::move(d);
                       }};
    ops[kUlSnr] = octet_field(&S::uplink_snr_db);
    ops[kBattery] = octet_field(&S::battery_status);
    ops[kUlFreqHopping] = bits_field(&S::uplink_freq_hopping, 1);
    ops[kTimestamp] = u64_field(&S::timestamp_reception);
    ops[kUlRssi] = {[](const S& s) { return s.uplink_rssi_dbm.has_value(); },
                    [](const S& s, ByteWriter& w) {
                        w.u8(static_cast<std::uint8_t>(static_cast<std::int8_t>(*s.uplink_rssi_dbm + 128)));
                    },
                    [](S& s, ByteReader& r) {
                        s.uplink_rssi_dbm = static_cast<std::int16_t>(static_cast<std::int8_t>(r.u8()) - 128);
                    }};
    ops[kUlUtilization] = octet_field(&S::channel_utilization_pct);
    ops[kPowerSource] = bits_field(&S::device_power_source, 3);
    ops[kTimingAdvance] = octet_field(&S::timing_advance);
    ops[kReceiveWindowCfg] = octet_field(&S::receive_window_cfg);
    ops[kChannelPlanCfg] = bits_field(&S::channel_plan_cfg, 4);
    ops[kFrequencyBand] = bits_field(&S::frequency_band, 4);
    ops[kFirmwareVersion] = {[](const S& s) { return s.firmware_version.has_value(); },
                             [](const S& s, ByteWriter& w) {
                                 w.u16(static_cast<std::uint16_t>(s.firmware_version->size()));
                                 w.bytes(ByteView(reinterpret_cast<const std::uint8_t*>(s.firmware_version->data()),
                                                  s.firmware_version->size()));
                             },
                             [](S& s, ByteReader& r) {
                                 const auto n = r.u16();
                                 const auto v = r.bytes(n);
                                 s.firmware_version = std::string(v.begin(), v.end());
                             }};
    ops[kPreambleLength] = octet_field(&S::preamble_length);
    ops[kAntennaSelection] = opaque_field(&S::antenna_selection);
    ops[kChannelIndex] = octet_field(&S::channel_index);
    ops[kFilterIndex] = bits_field(&S::filter_index, 4);
    ops[kDeviceAddress] = u32_field(&S::device_address);
    ops[kDlPayload] = {[](const S& s) { return s.dl_payload.has_value(); },
                       [](const S& s, ByteWriter& w) {
                           w.u16(static_cast<std::uint16_t>(s.dl_payload->size() * 2));
                           for (auto v : *s.dl_payload)
                               w.u16(v);
                       },
                       [](S& s, ByteReader& r) {
                           const std::size_t at = r.offset();
                           const auto n = r.u16();
                           if (n % 2 != 0)
                               raise(ErrorKind::Format, "downlink payload length " + std::to_string(n) +
                                                            " is odd at offset " + std::to_string(at));
                           std::vector<std::uint16_t> v(n / 2);
                           for (auto& x : v)
                               x = r.u16();
                           s.dl_payload = std::move(v);
                       }};
    ops[kFreqHoppingPattern] = octet_field(&S::freq_hopping_pattern);
    ops[kTxPower] = octet_field(&S::tx_power_dbm);
    ops[kTransmissionSlot] = u64_field(&S::transmission_slot);
    ops[kRxWindowCfg] = u16_field(&S::rx_window_cfg);
    ops[kDeviceClass] = bits_field(&S::device_class, 2);
    ops[kEnergyMode] = octet_field(&S::energy_mode);
    ops[kNetworkSync] = opaque_field(&S::network_sync);
    ops[kTrafficPriority] = opaque_field(&S::traffic_priority);
    ops[kBeaconBroadcast] = opaque_field(&S::beacon_broadcast);
    return ops;
}

}  // namespace

const std::array<FieldOps, kAttributeCount>& field_ops()
{
    static const auto ops = make_ops();
    return ops;
}

}  // namespace detail

namespace {

Bytes encode_body(const LoRaWANSection& s, std::uint64_t& presence)
{
    ByteWriter w;
    presence = 0;
    const auto& ops = detail::field_ops();
    for (std::size_t i = 0; i < kAttributeCount; ++i) {
        const bool present = detail::in_header_group(i) || ops[i].present(s);
        if (!present)
            continue;
        presence |= std::uint64_t{1} << (kPresenceBits - 1 - i);
        if (!detail::in_header_group(i))
            ops[i].write(s, w);
    }
    return w.take();
}

std::uint8_t options_length_for(std::size_t body_octets)
{
    return static_cast<std::uint8_t>(body_octets >= 255 ? 255 : body_octets);
}

}  // namespace

std::uint8_t section_options_length(const LoRaWANSection& s)
{
    std::uint64_t presence = 0;
    return options_length_for(encode_body(s, presence).size());
}

Bytes encode_section(const LoRaWANSection& s)
{
    const auto v = validate_section(s);
    if (!v.empty())
        raise(ErrorKind::Validation, "invalid section: " + format_violations(v));
    std::uint64_t presence = 0;
    const Bytes body = encode_body(s, presence);

    ByteWriter w;
    w.bits(s.spreading_factor, 4);
    w.bits(s.bandwidth_code, 4);
    w.u8(s.lorawan_version);
    w.bits(static_cast<std::uint32_t>(s.direction), 1);
    w.bits(s.payload_version, 3);
    w.bits(0, 4);
    w.u8(s.section_id);
    w.u8(options_length_for(body.size()));
    w.u8(static_cast<std::uint8_t>(presence >> 32));
    w.u32(static_cast<std::uint32_t>(presence));
    w.bytes(body);
    return w.take();
}

LoRaWANSection decode_section(ByteView bytes)
{
    if (bytes.empty())
        raise(ErrorKind::Length, "empty section at offset 0");
    ByteReader r(bytes);
    LoRaWANSection s;
    s.spreading_factor = static_cast<std::uint8_t>(r.bits(4));
    s.bandwidth_code = static_cast<std::uint8_t>(r.bits(4));
    s.lorawan_version = r.u8();
    s.direction = static_cast<Direction>(r.bits(1));
    s.payload_version = static_cast<std::uint8_t>(r.bits(3));
    if (r.bits(4) != 0)
        raise(ErrorKind::Format, "reserved header bits set at offset 2");
    s.section_id = r.u8();
    const std::uint8_t sol = r.u8();
    std::uint64_t presence = r.u8();
    presence = presence << 32 | r.u32();

    for (std::size_t i = kAttributeCount; i < kPresenceBits; ++i)
        if (presence & (std::uint64_t{1} << (kPresenceBits - 1 - i)))
            raise(ErrorKind::Format, "undefined presence bit " + std::to_string(i) + " set at offset 5");
    const std::size_t body_start = r.offset();
    const auto& ops = detail::field_ops();
    for (std::size_t i = 0; i < kAttributeCount; ++i) {
        const bool bit = presence & (std::uint64_t{1} << (kPresenceBits - 1 - i));
        if (detail::in_header_group(i)) {
            if (!bit)
                raise(ErrorKind::Format, "presence bit for header attribute '" +
                                             std::string(attribute_table()[i].name) + "' clear at offset 5");
            continue;
        }
        if (bit)
            ops[i].read(s, r);
    }
    r.align();
    if (!r.at_end())
        raise(ErrorKind::Length, "trailing octets after section at offset " + std::to_string(r.offset()));
    const std::size_t body = r.offset() - body_start;
    if (sol != options_length_for(body))
        raise(ErrorKind::Format, "section options length " + std::to_string(sol) + " does not match body of " +
                                     std::to_string(body) + " octets");
    const auto v = validate_section(s);
    if (!v.empty())
        raise(ErrorKind::Validation, "invalid section: " + format_violations(v));
    return s;
}

Bytes encode_ecpri(ByteView payload, std::uint8_t message_type, bool concat)
{
    if (payload.size() > kMaxEcpriPayload)
        raise(ErrorKind::Range, "eCPRI payload of " + std::to_string(payload.size()) + " octets exceeds 65535");
    ByteWriter w;
    w.bits(1, 4);
    w.bits(0, 3);
    w.bits(concat ? 1 : 0, 1);
    w.u8(message_type);
    w.u16(static_cast<std::uint16_t>(payload.size()));
    w.bytes(payload);
    return w.take();
}

EcpriFrame decode_ecpri(ByteView frame)
{
    if (frame.size() < kEcpriHeaderOctets)
        raise(ErrorKind::Length, "eCPRI frame of " + std::to_string(frame.size()) +
                                     " octets is shorter than the 4-octet header (offset 0)");
    ByteReader r(frame);
    EcpriFrame f;
    f.header.revision = static_cast<std::uint8_t>(r.bits(4));
    if (r.bits(3) != 0)
        raise(ErrorKind::Format, "eCPRI reserved bits set at offset 0");
    f.header.concat = r.bits(1) != 0;
    if (f.header.revision != 1)
        raise(ErrorKind::Format, "eCPRI revision " + std::to_string(f.header.revision) + " unsupported at offset 0");
    f.header.message_type = r.u8();
    f.header.payload_size = r.u16();
    if (f.header.message_type > kLoRaWANSectionType)
        raise(ErrorKind::UnknownType, "eCPRI message type 0x" + to_hex(Bytes{f.header.message_type}) +
                                          " not supported at offset 1");
    if (r.remaining() != f.header.payload_size)
        raise(ErrorKind::Length, "eCPRI payload_size " + std::to_string(f.header.payload_size) + " but " +
                                     std::to_string(r.remaining()) + " octets follow the header at offset 4");
    const auto p = r.bytes(f.header.payload_size);
    f.payload.assign(p.begin(), p.end());
    return f;
}

Bytes encode_frame(const LoRaWANSection& s, bool concat)
{
    return encode_ecpri(encode_section(s), kLoRaWANSectionType, concat);
}

LoRaWANSection decode_frame(ByteView frame)
{
    const auto f = decode_ecpri(frame);
    if (f.header.message_type != kLoRaWANSectionType)
        raise(ErrorKind::UnknownType, "frame carries message type 0x" + to_hex(Bytes{f.header.message_type}) +
                                          ", not a LoRaWAN section");
    try {
        return decode_section(f.payload);
    } catch (const Error& e) {
        // Report offsets relative to the frame.
        std::string msg = e.what();
        raise(e.kind(), msg + " (section starts at frame offset 4)");
    }
}

namespace {
constexpr std::string_view kCaptureMagic = "OLRW1";
}

Bytes encode_capture(const std::vector<Bytes>& frames)
{
    ByteWriter w;
    w.bytes(ByteView(reinterpret_cast<const std::uint8_t*>(kCaptureMagic.data()), kCaptureMagic.size()));
    for (const auto& f : frames) {
        w.u32(static_cast<std::uint32_t>(f.size()));
        w.bytes(f);
    }
    return w.take();
}

std::vector<Bytes> decode_capture(ByteView data)
{
    if (data.size() < kCaptureMagic.size() ||
        std::string_view(reinterpret_cast<const char*>(data.data()), kCaptureMagic.size()) != kCaptureMagic)
        raise(ErrorKind::Format, "missing OLRW1 capture magic at offset 0");
    ByteReader r(data.subspan(kCaptureMagic.size()));
    std::vector<Bytes> frames;
    while (!r.at_end()) {
        const std::size_t at = r.offset() + kCaptureMagic.size();
        if (r.remaining() < 4)
            raise(ErrorKind::Length, "truncated capture record header at offset " + std::to_string(at));
        const auto n = r.u32();
        if (r.remaining() < n)
            raise(ErrorKind::Length, "truncated capture record at offset " + std::to_string(at) + ": declares " +
                                         std::to_string(n) + " octets, " + std::to_string(r.remaining()) + " remain");
        const auto v = r.bytes(n);
        frames.emplace_back(v.begin(), v.end());
    }
    return frames;
}

void write_capture(const std::filesystem::path& path, const std::vector<Bytes>& frames)
{
    const Bytes data = encode_capture(frames);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out)
        raise(ErrorKind::Io, "write failed for " + path.string());
}

std::vector<Bytes> read_capture(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorKind::Io, "cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_capture(data);
}

}  // namespace olrw::fronthaul
