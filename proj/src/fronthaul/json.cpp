/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/fronthaul/json.hpp"

#include <set>
#include <sstream>

#include "olrw/common/error.hpp"

namespace olrw::fronthaul {

using nlohmann::json;

namespace {

const char* class_name(DeviceClass c)
{
    switch (c) {
    case DeviceClass::A: return "A";
    case DeviceClass::B: return "B";
    case DeviceClass::C: return "C";
    }
    return "?";
}

const char* power_name(PowerSource p)
{
    switch (p) {
    case PowerSource::Battery: return "battery";
    case PowerSource::Usb: return "usb";
    case PowerSource::Solar: return "solar";
    case PowerSource::Mains: return "mains";
    }
    return "?";
}

template <class T>
T get_int(const json& j, const char* key, long long lo, long long hi)
{
    if (!j.is_number_integer())
        raise(ErrorKind::Parse, std::string("'") + key + "' must be an integer");
    const auto v = j.get<long long>();
    if (v < lo || v > hi)
        raise(ErrorKind::Parse, std::string("'") + key + "' value " + std::to_string(v) + " does not fit its field");
    return static_cast<T>(v);
}

Bytes get_hex(const json& j, const char* key)
{
    if (!j.is_string())
        raise(ErrorKind::Parse, std::string("'") + key + "' must be a hex string");
    return from_hex(j.get<std::string>());
}

}  // namespace

json section_to_json(const LoRaWANSection& s)
{
    json j;
    j["direction"] = s.direction == Direction::UL ? "UL" : "DL";
    j["payload_version"] = s.payload_version;
    j["section_id"] = s.section_id;
    j["spreading_factor"] = s.spreading_factor;
    j["bandwidth_code"] = s.bandwidth_code;
    j["lorawan_version"] = s.lorawan_version;
    if (s.filter_index) j["filter_index"] = *s.filter_index;
    if (s.i_samples) j["i_samples"] = *s.i_samples;
    if (s.q_samples) j["q_samples"] = *s.q_samples;
    if (s.demodulation_info) {
        json arr = json::array();
        for (const auto& e : *s.demodulation_info)
            arr.push_back({{"symbol", e.symbol}, {"metric_q", e.metric_q}});
        j["demodulation_info"] = arr;
    }
    if (s.uplink_snr_db) j["uplink_snr_db"] = *s.uplink_snr_db;
    if (s.battery_status) j["battery_status"] = *s.battery_status;
    if (s.uplink_freq_hopping) j["uplink_freq_hopping"] = *s.uplink_freq_hopping;
    if (s.timestamp_reception) j["timestamp_reception"] = *s.timestamp_reception;
    if (s.uplink_rssi_dbm) j["uplink_rssi_dbm"] = *s.uplink_rssi_dbm;
    if (s.channel_utilization_pct) j["channel_utilization_pct"] = *s.channel_utilization_pct;
    if (s.device_power_source) j["device_power_source"] = power_name(*s.device_power_source);
    if (s.timing_advance) j["timing_advance"] = *s.timing_advance;
    if (s.receive_window_cfg) j["receive_window_cfg"] = *s.receive_window_cfg;
    if (s.channel_plan_cfg) j["channel_plan_cfg"] = *s.channel_plan_cfg;
    if (s.frequency_band) j["frequency_band"] = *s.frequency_band;
    if (s.firmware_version) j["firmware_version"] = *s.firmware_version;
    if (s.preamble_length) j["preamble_length"] = *s.preamble_length;
    if (s.antenna_selection) j["antenna_selection"] = to_hex(*s.antenna_selection);
    if (s.channel_index) j["channel_index"] = *s.channel_index;
    if (s.device_address) j["device_address"] = *s.device_address;
    if (s.dl_payload) j["dl_payload"] = *s.dl_payload;
    if (s.freq_hopping_pattern) j["freq_hopping_pattern"] = *s.freq_hopping_pattern;
    if (s.tx_power_dbm) j["tx_power_dbm"] = *s.tx_power_dbm;
    if (s.transmission_slot) j["transmission_slot"] = *s.transmission_slot;
    if (s.rx_window_cfg) j["rx_window_cfg"] = *s.rx_window_cfg;
    if (s.device_class) j["device_class"] = class_name(*s.device_class);
    if (s.energy_mode) j["energy_mode"] = *s.energy_mode;
    if (s.network_sync) j["network_sync"] = to_hex(*s.network_sync);
    if (s.traffic_priority) j["traffic_priority"] = to_hex(*s.traffic_priority);
    if (s.beacon_broadcast) j["beacon_broadcast"] = to_hex(*s.beacon_broadcast);
    return j;
}

LoRaWANSection section_from_json(const json& j)
{
    if (!j.is_object())
        raise(ErrorKind::Parse, "section must be an object");
    static const std::set<std::string> known{
        "direction", "payload_version", "section_id", "spreading_factor", "bandwidth_code", "lorawan_version",
        "filter_index", "i_samples", "q_samples", "demodulation_info", "uplink_snr_db", "battery_status",
        "uplink_freq_hopping", "timestamp_reception", "uplink_rssi_dbm", "channel_utilization_pct",
        "device_power_source", "timing_advance", "receive_window_cfg", "channel_plan_cfg", "frequency_band",
        "firmware_version", "preamble_length", "antenna_selection", "channel_index", "device_address", "dl_payload",
        "freq_hopping_pattern", "tx_power_dbm", "transmission_slot", "rx_window_cfg", "device_class", "energy_mode",
        "network_sync", "traffic_priority", "beacon_broadcast"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k))
            raise(ErrorKind::Parse, "unknown section key '" + k + "'");

    LoRaWANSection s;
    if (!j.contains("direction") || !j["direction"].is_string())
        raise(ErrorKind::Parse, "'direction' must be \"UL\" or \"DL\"");
    const auto dir = j["direction"].get<std::string>();
    if (dir != "UL" && dir != "DL")
        raise(ErrorKind::Parse, "'direction' must be \"UL\" or \"DL\"");
    s.direction = dir == "UL" ? Direction::UL : Direction::DL;

    auto u8 = [&](const char* k) { return get_int<std::uint8_t>(j.at(k), k, 0, 255); };
    if (j.contains("payload_version")) s.payload_version = u8("payload_version");
    if (j.contains("section_id")) s.section_id = u8("section_id");
    if (j.contains("spreading_factor")) s.spreading_factor = u8("spreading_factor");
    if (j.contains("bandwidth_code")) s.bandwidth_code = u8("bandwidth_code");
    if (j.contains("lorawan_version")) s.lorawan_version = u8("lorawan_version");
    if (j.contains("filter_index")) s.filter_index = u8("filter_index");
    auto floats = [&](const char* k) {
        std::vector<float> v;
        if (!j.at(k).is_array())
            raise(ErrorKind::Parse, std::string("'") + k + "' must be an array");
        for (const auto& x : j.at(k)) {
            if (!x.is_number())
                raise(ErrorKind::Parse, std::string("'") + k + "' entries must be numbers");
            v.push_back(x.get<float>());
        }
        return v;
    };
    if (j.contains("i_samples")) s.i_samples = floats("i_samples");
    if (j.contains("q_samples")) s.q_samples = floats("q_samples");
    if (j.contains("demodulation_info")) {
        std::vector<DemodEntry> d;
        if (!j["demodulation_info"].is_array())
            raise(ErrorKind::Parse, "'demodulation_info' must be an array");
        for (const auto& e : j["demodulation_info"]) {
            if (!e.is_object() || !e.contains("symbol") || !e.contains("metric_q") || e.size() != 2)
                raise(ErrorKind::Parse, "demodulation_info entries need exactly 'symbol' and 'metric_q'");
            d.push_back({get_int<std::uint16_t>(e["symbol"], "symbol", 0, 65535),
                         get_int<std::uint8_t>(e["metric_q"], "metric_q", 0, 255)});
        }
        s.demodulation_info = std::move(d);
    }
    if (j.contains("uplink_snr_db")) s.uplink_snr_db = get_int<std::int8_t>(j["uplink_snr_db"], "uplink_snr_db", -128, 127);
    if (j.contains("battery_status")) s.battery_status = u8("battery_status");
    if (j.contains("uplink_freq_hopping")) {
        if (!j["uplink_freq_hopping"].is_boolean())
            raise(ErrorKind::Parse, "'uplink_freq_hopping' must be a boolean");
        s.uplink_freq_hopping = j["uplink_freq_hopping"].get<bool>();
    }
    if (j.contains("timestamp_reception")) {
        if (!j["timestamp_reception"].is_number_unsigned())
            raise(ErrorKind::Parse, "'timestamp_reception' must be a non-negative integer");
        s.timestamp_reception = j["timestamp_reception"].get<std::uint64_t>();
    }
    if (j.contains("uplink_rssi_dbm"))
        s.uplink_rssi_dbm = get_int<std::int16_t>(j["uplink_rssi_dbm"], "uplink_rssi_dbm", -256, -1);
    if (j.contains("channel_utilization_pct")) s.channel_utilization_pct = u8("channel_utilization_pct");
    if (j.contains("device_power_source")) {
        const auto& v = j["device_power_source"];
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name == "battery") s.device_power_source = PowerSource::Battery;
        else if (name == "usb") s.device_power_source = PowerSource::Usb;
        else if (name == "solar") s.device_power_source = PowerSource::Solar;
        else if (name == "mains") s.device_power_source = PowerSource::Mains;
        else raise(ErrorKind::Parse, "'device_power_source' must be battery, usb, solar or mains");
    }
    if (j.contains("timing_advance")) s.timing_advance = u8("timing_advance");
    if (j.contains("receive_window_cfg")) s.receive_window_cfg = u8("receive_window_cfg");
    if (j.contains("channel_plan_cfg")) s.channel_plan_cfg = u8("channel_plan_cfg");
    if (j.contains("frequency_band")) s.frequency_band = u8("frequency_band");
    if (j.contains("firmware_version")) {
        if (!j["firmware_version"].is_string())
            raise(ErrorKind::Parse, "'firmware_version' must be a string");
        s.firmware_version = j["firmware_version"].get<std::string>();
    }
    if (j.contains("preamble_length")) s.preamble_length = u8("preamble_length");
    if (j.contains("antenna_selection")) s.antenna_selection = get_hex(j["antenna_selection"], "antenna_selection");
    if (j.contains("channel_index")) s.channel_index = u8("channel_index");
    if (j.contains("device_address"))
        s.device_address = get_int<std::uint32_t>(j["device_address"], "device_address", 0, 0xFFFFFFFFll);
    if (j.contains("dl_payload")) {
        std::vector<std::uint16_t> v;
        if (!j["dl_payload"].is_array())
            raise(ErrorKind::Parse, "'dl_payload' must be an array");
        for (const auto& x : j["dl_payload"])
            v.push_back(get_int<std::uint16_t>(x, "dl_payload", 0, 65535));
        s.dl_payload = std::move(v);
    }
    if (j.contains("freq_hopping_pattern")) s.freq_hopping_pattern = u8("freq_hopping_pattern");
    if (j.contains("tx_power_dbm")) s.tx_power_dbm = u8("tx_power_dbm");
    if (j.contains("transmission_slot")) {
        if (!j["transmission_slot"].is_number_unsigned())
            raise(ErrorKind::Parse, "'transmission_slot' must be a non-negative integer");
        s.transmission_slot = j["transmission_slot"].get<std::uint64_t>();
    }
    if (j.contains("rx_window_cfg")) s.rx_window_cfg = get_int<std::uint16_t>(j["rx_window_cfg"], "rx_window_cfg", 0, 65535);
    if (j.contains("device_class")) {
        const auto& v = j["device_class"];
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name == "A") s.device_class = DeviceClass::A;
        else if (name == "B") s.device_class = DeviceClass::B;
        else if (name == "C") s.device_class = DeviceClass::C;
        else raise(ErrorKind::Parse, "'device_class' must be A, B or C");
    }
    if (j.contains("energy_mode")) s.energy_mode = u8("energy_mode");
    if (j.contains("network_sync")) s.network_sync = get_hex(j["network_sync"], "network_sync");
    if (j.contains("traffic_priority")) s.traffic_priority = get_hex(j["traffic_priority"], "traffic_priority");
    if (j.contains("beacon_broadcast")) s.beacon_broadcast = get_hex(j["beacon_broadcast"], "beacon_broadcast");
    return s;
}

std::string format_ecpri_header(const EcpriHeader& h)
{
    std::ostringstream o;
    o << "eCPRI revision " << static_cast<int>(h.revision) << ", concat " << (h.concat ? 1 : 0) << ", type 0x"
      << to_hex(Bytes{h.message_type}) << ", payload " << h.payload_size << " octets";
    return o.str();
}

std::string format_section(const LoRaWANSection& s)
{
    const auto& t = attribute_table();
    std::ostringstream o;
    auto line = [&](std::size_t idx, const std::string& value) { o << "  " << t[idx].name << ": " << value << "\n"; };
    auto list = [](const auto& v, std::size_t limit) {
        std::ostringstream l;
        l << "[";
        for (std::size_t i = 0; i < v.size() && i < limit; ++i)
            l << (i ? ", " : "") << +v[i];
        if (v.size() > limit)
            l << ", ... (" << v.size() << " total)";
        l << "]";
        return l.str();
    };
    // Table order; header-group attributes included.
    for (std::size_t i = 0; i < kAttributeCount; ++i) {
        switch (i) {
        case 0: if (s.i_samples) line(i, list(*s.i_samples, 8)); break;
        case 1: if (s.q_samples) line(i, list(*s.q_samples, 8)); break;
        case 2:
            if (s.demodulation_info) {
                std::ostringstream d;
                d << s.demodulation_info->size() << " symbols";
                std::size_t n = 0;
                for (const auto& e : *s.demodulation_info) {
                    if (n++ == 16) { d << " ..."; break; }
                    d << (n == 1 ? ": " : " ") << e.symbol << "@" << metric_db(e.metric_q) << "dB";
                }
                line(i, d.str());
            }
            break;
        case 3: if (s.uplink_snr_db) line(i, std::to_string(*s.uplink_snr_db) + " dB"); break;
        case 4: if (s.battery_status) line(i, std::to_string(*s.battery_status)); break;
        case 5: if (s.uplink_freq_hopping) line(i, *s.uplink_freq_hopping ? "enabled" : "disabled"); break;
        case 6: if (s.timestamp_reception) line(i, std::to_string(*s.timestamp_reception) + " ns"); break;
        case 7: if (s.uplink_rssi_dbm) line(i, std::to_string(*s.uplink_rssi_dbm) + " dBm"); break;
        case 8: if (s.channel_utilization_pct) line(i, std::to_string(*s.channel_utilization_pct) + " %"); break;
        case 9: if (s.device_power_source) line(i, power_name(*s.device_power_source)); break;
        case 10: if (s.timing_advance) line(i, std::to_string(*s.timing_advance)); break;
        case 11: if (s.receive_window_cfg) line(i, std::to_string(*s.receive_window_cfg)); break;
        case 12: if (s.channel_plan_cfg) line(i, std::to_string(*s.channel_plan_cfg)); break;
        case 13: if (s.frequency_band) line(i, std::to_string(*s.frequency_band)); break;
        case 14: line(i, "SF" + std::to_string(s.spreading_factor)); break;
        case 15: if (s.firmware_version) line(i, *s.firmware_version); break;
        case 16: if (s.preamble_length) line(i, std::to_string(*s.preamble_length)); break;
        case 17: if (s.antenna_selection) line(i, to_hex(*s.antenna_selection)); break;
        case 18: if (s.channel_index) line(i, std::to_string(*s.channel_index)); break;
        case 19:
            line(i, s.bandwidth_code <= 2 ? std::to_string(bandwidth_hz(s.bandwidth_code) / 1000) + " kHz"
                                          : "code " + std::to_string(s.bandwidth_code));
            break;
        case 20: line(i, "0x" + to_hex(Bytes{s.lorawan_version})); break;
        case 21: line(i, s.direction == Direction::UL ? "UL" : "DL"); break;
        case 22: line(i, std::to_string(s.payload_version)); break;
        case 23: if (s.filter_index) line(i, std::to_string(*s.filter_index)); break;
        case 24: line(i, std::to_string(s.section_id)); break;
        case 25: line(i, std::to_string(section_options_length(s)) + " octets"); break;
        case 26:
            if (s.device_address)
                line(i, "0x" + to_hex(Bytes{static_cast<std::uint8_t>(*s.device_address >> 24),
                                            static_cast<std::uint8_t>(*s.device_address >> 16),
                                            static_cast<std::uint8_t>(*s.device_address >> 8),
                                            static_cast<std::uint8_t>(*s.device_address)}));
            break;
        case 27: if (s.dl_payload) line(i, std::to_string(s.dl_payload->size()) + " symbols " + list(*s.dl_payload, 16)); break;
        case 28: if (s.freq_hopping_pattern) line(i, std::to_string(*s.freq_hopping_pattern)); break;
        case 29: if (s.tx_power_dbm) line(i, std::to_string(*s.tx_power_dbm) + " dBm"); break;
        case 30: if (s.transmission_slot) line(i, std::to_string(*s.transmission_slot) + " ns"); break;
        case 31: if (s.rx_window_cfg) line(i, std::to_string(*s.rx_window_cfg)); break;
        case 32: if (s.device_class) line(i, class_name(*s.device_class)); break;
        case 33: if (s.energy_mode) line(i, std::to_string(*s.energy_mode)); break;
        case 34: if (s.network_sync) line(i, to_hex(*s.network_sync)); break;
        case 35: if (s.traffic_priority) line(i, to_hex(*s.traffic_priority)); break;
        case 36: if (s.beacon_broadcast) line(i, to_hex(*s.beacon_broadcast)); break;
        default: break;
        }
    }
    return "LoRaWAN section (type 0x09)\n" + o.str();
}

}  // namespace olrw::fronthaul
