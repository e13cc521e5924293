/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/ns/ns.hpp"

#include <algorithm>

#include "olrw/common/error.hpp"
#include "olrw/common/hash.hpp"
#include "olrw/config/schema.hpp"
#include "olrw/phy/chain.hpp"

namespace olrw::ns {

NsConfig default_config()
{
    NsConfig c;
    c.dedup_window_ms = config::constants().dedup_window_ms;
    return c;
}

nlohmann::json to_json(const NsConfig& cfg)
{
    return {{"dedup_window_ms", cfg.dedup_window_ms}, {"adr_enabled", cfg.adr_enabled}};
}

NsConfig merge(const NsConfig& base, const nlohmann::json& delta)
{
    const auto v = config::validate_schema(delta, "o1.ns");
    if (!v.empty())
        raise(ErrorKind::Validation, "ns config: " + config::format_violations(v));
    NsConfig c = base;
    if (delta.contains("dedup_window_ms"))
        c.dedup_window_ms = delta["dedup_window_ms"].get<int>();
    if (delta.contains("adr_enabled"))
        c.adr_enabled = delta["adr_enabled"].get<bool>();
    return c;
}

double MergedUplink::best_snr_db() const
{
    double best = -1e300;
    for (const auto& g : gateways)
        best = std::max(best, g.snr_db);
    return best;
}

std::string select_downlink_gateway(const std::vector<GatewayObservation>& gws)
{
    if (gws.empty())
        raise(ErrorKind::Validation, "no gateway heard the uplink");
    const GatewayObservation* best = &gws.front();
    for (const auto& g : gws)
        if (g.snr_db > best->snr_db || (g.snr_db == best->snr_db && g.gateway_id < best->gateway_id))
            best = &g;
    return best->gateway_id;
}

const char* to_string(RxWindow w) { return w == RxWindow::RX1 ? "RX1" : "RX2"; }

const char* to_string(IngestResult r)
{
    switch (r) {
    case IngestResult::Opened: return "opened";
    case IngestResult::Merged: return "merged";
    case IngestResult::RejectedUnknown: return "rejected_unknown";
    case IngestResult::RejectedMic: return "rejected_mic";
    case IngestResult::RejectedReplay: return "rejected_replay";
    case IngestResult::RejectedDirection: return "rejected_direction";
    }
    return "?";
}

nlohmann::json as_record(const MergedUplink& m)
{
    nlohmann::json gws = nlohmann::json::array();
    for (const auto& g : m.gateways)
        gws.push_back({{"id", g.gateway_id}, {"snr_db", g.snr_db}, {"rssi_dbm", g.rssi_dbm}, {"timestamp_ns", g.timestamp}});
    nlohmann::json j{{"time_ns", m.merged_at},
                     {"dev_addr", mac::dev_addr_hex(m.dev_addr)},
                     {"fcnt", m.fcnt},
                     {"payload", to_hex(m.payload)},
                     {"sf", m.sf},
                     {"channel_hz", m.channel_hz},
                     {"uplink_end_ns", m.uplink_end},
                     {"gateways", std::move(gws)}};
    j["fport"] = m.frame.fport ? nlohmann::json(*m.frame.fport) : nlohmann::json(nullptr);
    return j;
}

NetworkServer::NetworkServer(NsConfig cfg) : cfg_(cfg) {}

void NetworkServer::register_device(const mac::DeviceSession& session)
{
    if (devices_.count(session.dev_addr))
        raise(ErrorKind::Conflict, "device " + mac::dev_addr_hex(session.dev_addr) + " already registered");
    Device d;
    d.session = session;
    d.assumed_power = config::constants().device_max_tx_power_dbm;
    devices_.emplace(session.dev_addr, std::move(d));
}

NetworkServer::Device& NetworkServer::device(std::uint32_t dev_addr)
{
    auto it = devices_.find(dev_addr);
    if (it == devices_.end())
        raise(ErrorKind::NotFound, "unknown device " + mac::dev_addr_hex(dev_addr));
    return it->second;
}

const NetworkServer::Device& NetworkServer::device(std::uint32_t dev_addr) const
{
    return const_cast<NetworkServer*>(this)->device(dev_addr);
}

const mac::DeviceSession& NetworkServer::session(std::uint32_t dev_addr) const { return device(dev_addr).session; }

IngestResult NetworkServer::ingest(const du::UplinkRecord& rec, SimTime now)
{
    ++counters_.copies;
    const mac::MacFrame f = mac::parse_mac(rec.frame);
    auto it = devices_.find(f.dev_addr);
    if (it == devices_.end()) {
        ++counters_.rejected_unknown;
        return IngestResult::RejectedUnknown;
    }
    if (!mac::is_uplink(f.mtype)) {
        ++counters_.rejected_direction;
        return IngestResult::RejectedDirection;
    }
    const auto v = mac::parse_and_verify(rec.frame, it->second.session);
    if (!v.mic_ok) {
        ++counters_.rejected_mic;
        return IngestResult::RejectedMic;
    }
    if (!v.fcnt_ok) {
        ++counters_.rejected_replay;
        return IngestResult::RejectedReplay;
    }
    const Key key{f.dev_addr, f.fcnt, fnv1a(rec.frame)};
    const GatewayObservation obs{rec.gateway_id, rec.snr_db, rec.rssi_dbm, rec.timestamp};
    auto w = windows_.find(key);
    if (w != windows_.end()) {
        ++counters_.duplicates;
        w->second.gateways.push_back(obs);
        w->second.uplink_end = std::min(w->second.uplink_end, rec.timestamp);
        return IngestResult::Merged;
    }
    Window nw;
    nw.close_at = now + static_cast<SimTime>(cfg_.dedup_window_ms) * kNsPerMs;
    nw.first = rec;
    nw.gateways.push_back(obs);
    nw.uplink_end = rec.timestamp;
    windows_.emplace(key, std::move(nw));
    return IngestResult::Opened;
}

std::optional<SimTime> NetworkServer::next_close() const
{
    std::optional<SimTime> t;
    for (const auto& [k, w] : windows_)
        if (!t || w.close_at < *t)
            t = w.close_at;
    return t;
}

std::vector<MergedUplink> NetworkServer::close_due(SimTime now)
{
    std::vector<std::pair<SimTime, Key>> due;
    for (const auto& [k, w] : windows_)
        if (w.close_at <= now)
            due.emplace_back(w.close_at, k);
    std::sort(due.begin(), due.end());
    std::vector<MergedUplink> out;
    for (const auto& [t, k] : due) {
        auto node = windows_.extract(k);
        Device& d = device(std::get<0>(k));
        // A different frame with the same counter may have been accepted meanwhile.
        const auto v = mac::parse_and_verify(node.mapped().first.frame, d.session);
        if (!v.mic_ok || !v.fcnt_ok) {
            ++counters_.rejected_replay;
            continue;
        }
        out.push_back(close(k, std::move(node.mapped()), now));
    }
    return out;
}

MergedUplink NetworkServer::close(const Key& key, Window w, SimTime now)
{
    Device& d = device(std::get<0>(key));
    const auto v = mac::parse_and_verify(w.first.frame, d.session);
    mac::accept_frame(d.session, v);
    ++counters_.merged;

    MergedUplink m;
    m.dev_addr = v.frame.dev_addr;
    m.fcnt = v.fcnt32;
    m.frame = v.frame;
    m.payload = mac::frame_plaintext(d.session, v);
    m.sf = w.first.sf;
    m.channel_hz = w.first.channel_hz;
    m.uplink_end = w.uplink_end;
    m.merged_at = now;
    m.gateways = std::move(w.gateways);
    std::sort(m.gateways.begin(), m.gateways.end(),
              [](const auto& a, const auto& b) { return a.gateway_id < b.gateway_id; });

    for (auto status : mac::decode_uplink_commands(v.frame.fopts)) {
        if (d.sent_adr && (status & 0x07) == 0x07)
            d.assumed_power = d.sent_adr->tx_power_dbm;
        d.sent_adr.reset();
    }
    if (v.frame.mtype == mac::MType::ConfirmedUp)
        d.ack_due = true;
    if (cfg_.adr_enabled && v.frame.fctrl.adr) {
        if (auto cmd = d.tracker.on_uplink(m.best_snr_db(), m.sf, d.assumed_power)) {
            d.pending_adr = cmd;
            ++counters_.adr_commands;
        }
    }

    auto rec = as_record(m);
    if (as_sink_)
        *as_sink_ << rec.dump() << '\n';
    as_log_.push_back(std::move(rec));
    return m;
}

std::string NetworkServer::downlink_gateway(const MergedUplink& m) const
{
    const Device& d = device(m.dev_addr);
    if (d.dl_gateway) {
        for (const auto& g : m.gateways)
            if (g.gateway_id == *d.dl_gateway)
                return g.gateway_id;
    }
    return select_downlink_gateway(m.gateways);
}

void NetworkServer::enqueue_downlink(std::uint32_t dev_addr, Bytes payload, std::uint8_t fport,
                                     std::optional<int> priority)
{
    Device& d = device(dev_addr);
    if (fport == 0 || fport > 223)
        raise(ErrorKind::Validation, "application port must be 1..223");
    const int p = priority.value_or(d.priority);
    if (p < 0)
        raise(ErrorKind::Validation, "priority must be >= 0");
    d.queue.push_back({dev_addr, std::move(payload), fport, p, seq_++});
}

std::size_t NetworkServer::queue_depth(std::uint32_t dev_addr) const { return device(dev_addr).queue.size(); }

bool NetworkServer::has_pending(std::uint32_t dev_addr) const
{
    const Device& d = device(dev_addr);
    return !d.queue.empty() || d.ack_due || d.pending_adr.has_value();
}

std::optional<DlDispatch> NetworkServer::schedule_downlink(const DlOpportunity& opp, const DlSender& send)
{
    Device& d = device(opp.dev_addr);
    if (!has_pending(opp.dev_addr))
        return std::nullopt;

    // Highest priority first, FIFO within a priority.
    auto item_it = std::min_element(d.queue.begin(), d.queue.end(), [](const auto& a, const auto& b) {
        return a.priority != b.priority ? a.priority > b.priority : a.seq < b.seq;
    });

    mac::TxOptions opt;
    opt.ack = d.ack_due;
    if (d.pending_adr)
        opt.fopts = mac::encode_link_adr_req({d.pending_adr->sf, d.pending_adr->tx_power_dbm});
    opt.fpending = d.queue.size() > 1;

    for (RxWindow win : {RxWindow::RX1, RxWindow::RX2}) {
        const du::RxSlot& slot = win == RxWindow::RX1 ? opp.windows.rx1 : opp.windows.rx2;
        mac::DeviceSession s = d.session;
        DlDispatch dl;
        dl.dev_addr = opp.dev_addr;
        dl.gateway_id = opp.gateway_id;
        dl.window = win;
        dl.params = {opp.dev_addr, slot.sf, slot.channel_hz, opp.tx_power_dbm, slot.time};
        dl.fcnt_down = s.fcnt_down;
        try {
            if (item_it != d.queue.end())
                dl.mac_frame = mac::build_downlink(s, item_it->fport, item_it->payload, slot.sf, opt);
            else
                dl.mac_frame = mac::build_downlink(s, 0, {}, slot.sf, opt);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Range)
                continue;  // payload does not fit this window's sf
            throw;
        }
        if (item_it != d.queue.end())
            dl.item = *item_it;
        dl.adr = d.pending_adr;
        try {
            send(dl);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::DutyCycle)
                continue;
            throw;
        }
        d.session = s;
        if (item_it != d.queue.end())
            d.queue.erase(item_it);
        d.ack_due = false;
        if (d.pending_adr) {
            d.sent_adr = d.pending_adr;
            d.pending_adr.reset();
        }
        ++counters_.downlinks;
        ++(win == RxWindow::RX1 ? counters_.rx1 : counters_.rx2);
        return dl;
    }
    ++counters_.deferred;
    return std::nullopt;
}

namespace {

struct DevicePath {
    std::uint32_t dev_addr = 0;
    std::string leaf;
};

std::optional<DevicePath> parse_device_path(const std::string& path)
{
    constexpr std::string_view prefix = "device/";
    if (path.rfind(prefix, 0) != 0)
        return std::nullopt;
    const auto slash = path.find('/', prefix.size());
    if (slash == std::string::npos)
        raise(ErrorKind::NotFound, "malformed control path '" + path + "'");
    return DevicePath{mac::dev_addr_from_hex(path.substr(prefix.size(), slash - prefix.size())), path.substr(slash + 1)};
}

}  // namespace

void NetworkServer::apply_control(const std::string& path, const nlohmann::json& value)
{
    if (auto dp = parse_device_path(path)) {
        Device& d = device(dp->dev_addr);
        const auto& c = config::constants();
        if (dp->leaf == "adr") {
            if (!value.is_object() || !value.contains("sf") || !value.contains("tx_power_dbm") ||
                !value["sf"].is_number_integer() || !value["tx_power_dbm"].is_number_integer())
                raise(ErrorKind::Validation, "adr control needs integer sf and tx_power_dbm");
            const int sf = value["sf"].get<int>();
            const int p = value["tx_power_dbm"].get<int>();
            if (sf < config::kMinSf || sf > config::kMaxSf)
                raise(ErrorKind::Validation, "adr sf out of range");
            if (p < c.device_min_tx_power_dbm || p > c.device_max_tx_power_dbm || (c.device_max_tx_power_dbm - p) % 2)
                raise(ErrorKind::Validation, "adr tx_power_dbm not a device power level");
            d.pending_adr = du::AdrCommand{sf, p};
            ++counters_.adr_commands;
        } else if (dp->leaf == "dl_gateway") {
            if (!value.is_string())
                raise(ErrorKind::Validation, "dl_gateway must be a string");
            const auto gw = value.get<std::string>();
            if (gw.empty())
                d.dl_gateway.reset();
            else
                d.dl_gateway = gw;
        } else if (dp->leaf == "priority") {
            if (!value.is_number_integer() || value.get<int>() < 0)
                raise(ErrorKind::Validation, "priority must be a non-negative integer");
            d.priority = value.get<int>();
        } else {
            raise(ErrorKind::NotFound, "unknown control path '" + path + "'");
        }
        return;
    }
    if (path == "dedup_window_ms" || path == "adr_enabled") {
        apply_config(nlohmann::json{{path, value}});
        return;
    }
    raise(ErrorKind::NotFound, "unknown control path '" + path + "'");
}

const NsConfig& NetworkServer::apply_config(const nlohmann::json& delta)
{
    cfg_ = merge(cfg_, delta);
    return cfg_;
}

KpiRecord NetworkServer::report(SimTime now) const
{
    KpiRecord k{"ns", now, {}};
    auto& m = k.metrics;
    const auto& c = counters_;
    m["copies"] = static_cast<double>(c.copies);
    m["duplicates"] = static_cast<double>(c.duplicates);
    m["merged"] = static_cast<double>(c.merged);
    m["dedup_ratio"] = c.merged + c.duplicates ? static_cast<double>(c.duplicates) / static_cast<double>(c.merged + c.duplicates) : 0.0;
    m["rejected_unknown"] = static_cast<double>(c.rejected_unknown);
    m["rejected_mic"] = static_cast<double>(c.rejected_mic);
    m["rejected_replay"] = static_cast<double>(c.rejected_replay);
    m["rejected_direction"] = static_cast<double>(c.rejected_direction);
    m["downlinks"] = static_cast<double>(c.downlinks);
    m["dl_rx1"] = static_cast<double>(c.rx1);
    m["dl_rx2"] = static_cast<double>(c.rx2);
    m["dl_deferred"] = static_cast<double>(c.deferred);
    m["adr_commands"] = static_cast<double>(c.adr_commands);
    std::size_t depth = 0;
    for (const auto& [a, d] : devices_)
        depth += d.queue.size();
    m["queue_depth"] = static_cast<double>(depth);
    m["devices"] = static_cast<double>(devices_.size());
    m["open_windows"] = static_cast<double>(windows_.size());
    return k;
}

KpiRecord NetworkServer::uplink_kpi(const MergedUplink& u) const
{
    KpiRecord k{"ns", u.merged_at, {}};
    const std::string p = "device/" + mac::dev_addr_hex(u.dev_addr) + "/";
    const std::size_t octets = mac::encode_mac(u.frame).size();
    k.metrics[p + "snr"] = u.best_snr_db();
    k.metrics[p + "sf"] = u.sf;
    k.metrics[p + "tx_power_dbm"] = device(u.dev_addr).assumed_power;
    k.metrics[p + "fcnt"] = u.fcnt;
    k.metrics[p + "adr"] = u.frame.fctrl.adr ? 1 : 0;
    k.metrics[p + "gateways"] = static_cast<double>(u.gateways.size());
    k.metrics[p + "airtime_s"] = phy::airtime_s(phy::PhyParams::make(u.sf), octets);
    k.metrics[p + "payload_octets"] = static_cast<double>(octets);
    for (const auto& g : u.gateways)
        k.metrics[p + "gw/" + g.gateway_id + "/snr"] = g.snr_db;
    return k;
}

int NetworkServer::assumed_tx_power(std::uint32_t dev_addr) const { return device(dev_addr).assumed_power; }

const du::AdrTracker& NetworkServer::adr_tracker(std::uint32_t dev_addr) const { return device(dev_addr).tracker; }

std::optional<du::AdrCommand> NetworkServer::pending_adr(std::uint32_t dev_addr) const
{
    return device(dev_addr).pending_adr;
}

}  // namespace olrw::ns
