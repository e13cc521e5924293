/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/du/du.hpp"

#include <algorithm>

#include "olrw/common/error.hpp"
#include "olrw/config/constants.hpp"
#include "olrw/fronthaul/codec.hpp"
#include "olrw/phy/chain.hpp"
#include "olrw/phy/sync.hpp"
#include "olrw/ru/ru.hpp"

namespace olrw::du {

DuConfig default_config()
{
    const auto& c = config::constants();
    DuConfig d;
    d.rx1_delay_s = c.rx1_delay_s;
    d.rx2_delay_s = c.rx2_delay_s;
    d.rx2_sf = c.channel_plan.rx2_sf;
    d.rx2_channel_hz = c.channel_plan.rx2_hz;
    d.duty_cycle_limit = c.duty_cycle_limit;
    d.dl_tx_power_dbm = c.gateway_tx_power_dbm;
    return d;
}

void validate(const DuConfig& cfg)
{
    if (!(cfg.rx1_delay_s > 0))
        raise(ErrorKind::Validation, "rx1_delay_s: must be positive");
    if (!(cfg.rx2_delay_s > cfg.rx1_delay_s))
        raise(ErrorKind::Validation, "rx2_delay_s: must exceed rx1_delay_s");
    if (cfg.rx2_sf < config::kMinSf || cfg.rx2_sf > config::kMaxSf)
        raise(ErrorKind::Validation, "rx2_sf: outside 7..12");
    if (!(cfg.duty_cycle_limit > 0 && cfg.duty_cycle_limit <= 1))
        raise(ErrorKind::Validation, "duty_cycle_limit: must lie in (0, 1]");
    const auto& c = config::constants();
    if (cfg.dl_tx_power_dbm < c.dl_tx_power_min_dbm || cfg.dl_tx_power_dbm > c.dl_tx_power_max_dbm)
        raise(ErrorKind::Validation, "dl_tx_power_dbm: outside 2..20");
    try {
        ru::dl_channel_index(cfg.rx2_channel_hz);
    } catch (const Error&) {
        raise(ErrorKind::Validation, "rx2_channel_hz: " + std::to_string(cfg.rx2_channel_hz) +
                                         " is not a downlink channel of the plan");
    }
}

nlohmann::json to_json(const DuConfig& cfg)
{
    return {{"rx1_delay_s", cfg.rx1_delay_s},         {"rx2_delay_s", cfg.rx2_delay_s},
            {"rx2_sf", cfg.rx2_sf},                   {"rx2_channel_hz", cfg.rx2_channel_hz},
            {"duty_cycle_limit", cfg.duty_cycle_limit}, {"adr_enabled", cfg.adr_enabled},
            {"ns_endpoint", cfg.ns_endpoint},         {"dl_tx_power_dbm", cfg.dl_tx_power_dbm}};
}

DuConfig merge(const DuConfig& base, const nlohmann::json& delta)
{
    if (!delta.is_object())
        raise(ErrorKind::Validation, "DU configuration must be an object");
    DuConfig c = base;
    try {
        for (const auto& [k, v] : delta.items()) {
            if (k == "rx1_delay_s")
                c.rx1_delay_s = v.get<double>();
            else if (k == "rx2_delay_s")
                c.rx2_delay_s = v.get<double>();
            else if (k == "rx2_sf")
                c.rx2_sf = v.get<int>();
            else if (k == "rx2_channel_hz")
                c.rx2_channel_hz = v.get<std::uint32_t>();
            else if (k == "duty_cycle_limit")
                c.duty_cycle_limit = v.get<double>();
            else if (k == "adr_enabled")
                c.adr_enabled = v.get<bool>();
            else if (k == "ns_endpoint")
                c.ns_endpoint = v.get<std::string>();
            else if (k == "dl_tx_power_dbm")
                c.dl_tx_power_dbm = v.get<int>();
            else
                raise(ErrorKind::Validation, k + ": unknown DU parameter");
        }
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Validation, std::string("DU configuration: ") + e.what());
    }
    validate(c);
    return c;
}

std::string encode_record(const UplinkRecord& r)
{
    nlohmann::json j{{"gateway", r.gateway_id}, {"frame", to_hex(r.frame)}, {"snr_db", r.snr_db},
                     {"rssi_dbm", r.rssi_dbm},  {"timestamp", r.timestamp},  {"sf", r.sf},
                     {"channel_hz", r.channel_hz}, {"mic_present", r.mic_present}};
    return j.dump();
}

UplinkRecord decode_record(std::string_view line)
{
    UplinkRecord r;
    try {
        const auto j = nlohmann::json::parse(line);
        r.gateway_id = j.at("gateway").get<std::string>();
        r.frame = from_hex(j.at("frame").get<std::string>());
        r.snr_db = j.at("snr_db").get<double>();
        r.rssi_dbm = j.at("rssi_dbm").get<double>();
        r.timestamp = j.at("timestamp").get<SimTime>();
        r.sf = j.at("sf").get<int>();
        r.channel_hz = j.at("channel_hz").get<std::uint32_t>();
        r.mic_present = j.at("mic_present").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Parse, std::string("uplink record: ") + e.what());
    }
    r.mac_frame = mac::parse_mac(r.frame);
    return r;
}

std::string frame_record(const UplinkRecord& r)
{
    const std::string body = encode_record(r);
    return std::to_string(body.size()) + ":" + body;
}

std::vector<UplinkRecord> unframe_records(std::string_view stream)
{
    std::vector<UplinkRecord> out;
    std::size_t pos = 0;
    while (pos < stream.size()) {
        const std::size_t colon = stream.find(':', pos);
        if (colon == std::string_view::npos || colon == pos)
            raise(ErrorKind::Parse, "record length prefix missing at offset " + std::to_string(pos));
        std::size_t len = 0;
        for (std::size_t i = pos; i < colon; ++i) {
            if (stream[i] < '0' || stream[i] > '9')
                raise(ErrorKind::Parse, "record length prefix is not decimal at offset " + std::to_string(i));
            len = len * 10 + static_cast<std::size_t>(stream[i] - '0');
        }
        if (colon + 1 + len > stream.size())
            raise(ErrorKind::Length, "record truncated at offset " + std::to_string(colon + 1));
        out.push_back(decode_record(stream.substr(colon + 1, len)));
        pos = colon + 1 + len;
    }
    return out;
}

UplinkRecord security_passthrough(UplinkRecord rec)
{
    rec.mac_frame = mac::parse_mac(rec.frame);
    if (!mac::is_uplink(rec.mac_frame.mtype))
        raise(ErrorKind::Parse, "uplink record carries a downlink MType");
    const ByteView mic = ByteView(rec.frame).last(4);
    rec.mic_present = std::any_of(mic.begin(), mic.end(), [](std::uint8_t b) { return b != 0; });
    return rec;
}

RxWindows schedule_rx_windows(SimTime uplink_end, std::uint32_t uplink_channel_hz, int uplink_sf, const DuConfig& cfg)
{
    RxWindows w;
    w.rx1 = {uplink_end + from_seconds(cfg.rx1_delay_s), uplink_channel_hz, uplink_sf};
    w.rx2 = {uplink_end + from_seconds(cfg.rx2_delay_s), cfg.rx2_channel_hz, cfg.rx2_sf};
    return w;
}

DutyCycleTracker::DutyCycleTracker(double limit, double window_s) : limit_(limit), window_(from_seconds(window_s)) {}

double DutyCycleTracker::used_s(std::size_t band, SimTime t) const
{
    const auto it = used_.find(band);
    if (it == used_.end())
        return 0.0;
    double sum = 0;
    for (const auto& [start, air] : it->second)
        if (start > t - window_ && start <= t)
            sum += air;
    return sum;
}

bool DutyCycleTracker::allows(std::size_t band, SimTime start, double airtime_s) const
{
    // Transmissions count at their start time. The busiest window holding the new
    // one begins at one of the starts in (start - window, start].
    const double budget = limit_ * to_seconds(window_) + 1e-12;
    if (airtime_s > budget)
        return false;
    const auto it = used_.find(band);
    if (it == used_.end())
        return true;
    const auto& q = it->second;
    std::vector<SimTime> origins{start};
    for (const auto& e : q)
        if (e.first > start - window_ && e.first <= start)
            origins.push_back(e.first);
    for (SimTime o : origins) {
        double sum = airtime_s;
        for (const auto& [s, air] : q)
            if (s >= o && s < o + window_)
                sum += air;
        if (sum > budget)
            return false;
    }
    return true;
}

void DutyCycleTracker::record(std::size_t band, SimTime start, double airtime_s)
{
    auto& q = used_[band];
    q.emplace_back(start, airtime_s);
    std::sort(q.begin(), q.end());
    while (!q.empty() && q.front().first <= start - 2 * window_)
        q.pop_front();
}

DistributedUnit::DistributedUnit(std::string gateway_id, DuConfig cfg)
    : id_(std::move(gateway_id)),
      cfg_(std::move(cfg)),
      duty_(cfg_.duty_cycle_limit, config::constants().duty_cycle_window_s)
{
    validate(cfg_);
}

UplinkRecord DistributedUnit::process_uplink(const fronthaul::LoRaWANSection& section)
{
    return process_uplink(std::vector<fronthaul::LoRaWANSection>{section});
}

UplinkRecord DistributedUnit::process_uplink(const std::vector<fronthaul::LoRaWANSection>& sections)
{
    if (sections.empty())
        raise(ErrorKind::Shape, "uplink without sections");
    for (const auto& s : sections) {
        if (s.direction != fronthaul::Direction::UL)
            raise(ErrorKind::Validation, "DL section on the uplink path");
        const auto v = fronthaul::validate_section(s);
        if (!v.empty())
            raise(ErrorKind::Validation, fronthaul::format_violations(v));
    }
    const auto& head = sections.front();
    const auto p = phy::PhyParams::make(head.spreading_factor, fronthaul::bandwidth_hz(head.bandwidth_code));

    std::vector<std::uint16_t> symbols;
    if (head.i_samples) {
        std::vector<phy::Sample> iq;
        for (const auto& s : sections) {
            if (!s.i_samples || !s.q_samples)
                raise(ErrorKind::Validation, "IQ frame chunk without samples");
            for (std::size_t k = 0; k < s.i_samples->size(); ++k)
                iq.emplace_back((*s.i_samples)[k], (*s.q_samples)[k]);
        }
        const auto cap = phy::receive_frame(iq, p, ru::kSearchLimit);
        if (!cap.detection.sfd_found)
            raise(ErrorKind::Integrity, "no frame found in the IQ capture");
        for (const auto& r : cap.symbols)
            symbols.push_back(r.symbol);
    } else {
        for (const auto& s : sections)
            for (const auto& d : *s.demodulation_info)
                symbols.push_back(d.symbol);
    }

    const auto rec = phy::phy_recover(symbols, p);
    if (!rec.crc_on)
        raise(ErrorKind::Integrity, "uplink frame without payload CRC");
    if (!rec.crc_ok)
        raise(ErrorKind::Integrity, "payload CRC mismatch");

    UplinkRecord out;
    out.frame = rec.payload.bytes;
    out.gateway_id = id_;
    out.snr_db = *head.uplink_snr_db;
    out.rssi_dbm = *head.uplink_rssi_dbm;
    out.timestamp = static_cast<SimTime>(*head.timestamp_reception);
    out.sf = head.spreading_factor;
    out.channel_hz = head.channel_index ? ru::dl_channel_hz(*head.channel_index) : 0;
    return security_passthrough(std::move(out));
}

std::optional<std::vector<fronthaul::LoRaWANSection>> DistributedUnit::on_fronthaul(ByteView ecpri_frame)
{
    const auto f = fronthaul::decode_ecpri(ecpri_frame);
    if (f.header.message_type != fronthaul::kLoRaWANSectionType)
        return std::nullopt;
    partial_.push_back(fronthaul::decode_section(f.payload));
    if (f.header.concat)
        return std::nullopt;
    std::vector<fronthaul::LoRaWANSection> out;
    out.swap(partial_);
    return out;
}

std::optional<UplinkRecord> DistributedUnit::handle_uplink(const std::vector<fronthaul::LoRaWANSection>& sections)
{
    ++counters_.uplinks;
    try {
        auto rec = process_uplink(sections);
        counters_.snr_sum += rec.snr_db;
        counters_.rssi_sum += rec.rssi_dbm;
        known_devices_[rec.mac_frame.dev_addr] = rec.timestamp;
        return rec;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse)
            ++counters_.parse_errors;
        else
            ++counters_.integrity_errors;
        return std::nullopt;
    }
}

fronthaul::LoRaWANSection DistributedUnit::build_downlink(ByteView mac_frame, const DlParams& tx)
{
    const auto& c = config::constants();
    if (tx.tx_power_dbm < c.dl_tx_power_min_dbm || tx.tx_power_dbm > c.dl_tx_power_max_dbm)
        raise(ErrorKind::Range, "tx power " + std::to_string(tx.tx_power_dbm) + " dBm outside 2 dBm to 20 dBm");
    const auto band = c.channel_plan.sub_band_of(tx.channel_hz);
    if (!band)
        raise(ErrorKind::Range, "downlink frequency " + std::to_string(tx.channel_hz) + " Hz outside every sub-band");
    const auto p = phy::PhyParams::make(tx.sf, c.channel_plan.bw_hz, 1, 8, false);
    const auto block = phy::phy_assemble(phy::PhyPayload{Bytes(mac_frame.begin(), mac_frame.end()), std::nullopt}, p);
    const double air = phy::frame_airtime_s(p, block.symbols.size());
    if (!duty_.allows(*band, tx.slot, air)) {
        ++counters_.duty_rejections;
        raise(ErrorKind::DutyCycle, "downlink of " + std::to_string(air) + " s exceeds the " +
                                        c.channel_plan.sub_bands[*band].name + " duty-cycle budget");
    }

    fronthaul::LoRaWANSection s;
    s.direction = fronthaul::Direction::DL;
    s.payload_version = 1;
    s.spreading_factor = static_cast<std::uint8_t>(tx.sf);
    s.bandwidth_code = fronthaul::bandwidth_code(c.channel_plan.bw_hz);
    s.lorawan_version = static_cast<std::uint8_t>(c.lorawan_version_code);
    s.device_address = tx.device_address;
    s.dl_payload = block.symbols;
    s.tx_power_dbm = static_cast<std::uint8_t>(tx.tx_power_dbm);
    s.transmission_slot = static_cast<std::uint64_t>(tx.slot);
    s.channel_index = ru::dl_channel_index(tx.channel_hz);
    s.preamble_length = static_cast<std::uint8_t>(p.preamble_len);
    s.device_class = fronthaul::DeviceClass::A;

    duty_.record(*band, tx.slot, air);
    ++counters_.downlinks;
    counters_.dl_airtime_s += air;
    return s;
}

Bytes DistributedUnit::build_downlink_frame(ByteView mac_frame, const DlParams& tx)
{
    return fronthaul::encode_frame(build_downlink(mac_frame, tx));
}

RxWindows DistributedUnit::rx_windows(SimTime uplink_end, std::uint32_t channel_hz, int sf) const
{
    return schedule_rx_windows(uplink_end, channel_hz, sf, cfg_);
}

std::vector<UplinkRecord> DistributedUnit::forward_to_ns(UplinkRecord rec)
{
    if (!ns_up_) {
        if (retry_.size() >= static_cast<std::size_t>(config::constants().du_retry_queue_capacity)) {
            retry_.pop_front();
            ++counters_.dropped;
        }
        retry_.push_back(std::move(rec));
        return {};
    }
    auto out = flush_retry_queue();
    out.push_back(std::move(rec));
    ++counters_.forwarded;
    return out;
}

std::vector<UplinkRecord> DistributedUnit::flush_retry_queue()
{
    if (!ns_up_)
        return {};
    std::vector<UplinkRecord> out(std::make_move_iterator(retry_.begin()), std::make_move_iterator(retry_.end()));
    retry_.clear();
    counters_.forwarded += out.size();
    return out;
}

void DistributedUnit::apply_control(const std::string& path, const nlohmann::json& value)
{
    constexpr std::string_view prefix = "device/";
    if (path.rfind(prefix, 0) == 0) {
        const auto slash = path.find('/', prefix.size());
        if (slash == std::string::npos)
            raise(ErrorKind::NotFound, "unknown control path " + path);
        const std::uint32_t addr = mac::dev_addr_from_hex(path.substr(prefix.size(), slash - prefix.size()));
        const std::string leaf = path.substr(slash + 1);
        if (leaf != "dl_tx_power_dbm")
            raise(ErrorKind::NotFound, "unknown control path " + path);
        if (!known_devices_.count(addr))
            raise(ErrorKind::NotFound, "device " + mac::dev_addr_hex(addr) + " unknown to " + id_);
        if (!value.is_number_integer())
            raise(ErrorKind::Validation, path + ": expected an integer");
        const int p = value.get<int>();
        const auto& c = config::constants();
        if (p < c.dl_tx_power_min_dbm || p > c.dl_tx_power_max_dbm)
            raise(ErrorKind::Validation, path + ": outside 2..20");
        dl_power_override_[addr] = p;
        return;
    }
    static const std::vector<std::string> keys{"rx2_sf",           "rx2_channel_hz", "rx1_delay_s",
                                               "rx2_delay_s",      "duty_cycle_limit", "adr_enabled",
                                               "dl_tx_power_dbm"};
    if (std::find(keys.begin(), keys.end(), path) == keys.end())
        raise(ErrorKind::NotFound, "unknown control path " + path);
    apply_config(nlohmann::json{{path, value}});
}

const DuConfig& DistributedUnit::apply_config(const nlohmann::json& delta)
{
    cfg_ = merge(cfg_, delta);
    duty_.set_limit(cfg_.duty_cycle_limit);
    return cfg_;
}

int DistributedUnit::dl_tx_power_for(std::uint32_t dev_addr) const
{
    const auto it = dl_power_override_.find(dev_addr);
    return it == dl_power_override_.end() ? cfg_.dl_tx_power_dbm : it->second;
}

KpiRecord DistributedUnit::report(SimTime now) const
{
    KpiRecord r;
    r.node_id = id_;
    r.timestamp = now;
    const auto& c = counters_;
    const std::uint64_t ok = c.uplinks - c.integrity_errors - c.parse_errors;
    r.metrics["uplinks"] = static_cast<double>(c.uplinks);
    r.metrics["integrity_errors"] = static_cast<double>(c.integrity_errors);
    r.metrics["parse_errors"] = static_cast<double>(c.parse_errors);
    r.metrics["forwarded"] = static_cast<double>(c.forwarded);
    r.metrics["dropped"] = static_cast<double>(c.dropped);
    r.metrics["queue_depth"] = static_cast<double>(retry_.size());
    r.metrics["downlinks"] = static_cast<double>(c.downlinks);
    r.metrics["duty_rejections"] = static_cast<double>(c.duty_rejections);
    r.metrics["airtime_s"] = c.dl_airtime_s;
    r.metrics["pdr"] = c.uplinks ? static_cast<double>(ok) / static_cast<double>(c.uplinks) : 0.0;
    r.metrics["snr"] = ok ? c.snr_sum / static_cast<double>(ok) : 0.0;
    r.metrics["rssi"] = ok ? c.rssi_sum / static_cast<double>(ok) : 0.0;
    return r;
}

}  // namespace olrw::du
