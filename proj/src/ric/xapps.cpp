/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <algorithm>
#include <cmath>
#include <fstream>

#include "olrw/common/error.hpp"
#include "olrw/mac/frame.hpp"
#include "olrw/ric/ric.hpp"

namespace olrw::ric {

std::vector<DeviceUplink> device_uplinks(const KpiRecord& k)
{
    std::map<std::uint32_t, DeviceUplink> devs;
    constexpr std::string_view prefix = "device/";
    for (const auto& [name, v] : k.metrics) {
        if (name.rfind(prefix, 0) != 0 || name.size() < prefix.size() + 10 || name[prefix.size() + 8] != '/')
            continue;
        const std::uint32_t addr = mac::dev_addr_from_hex(name.substr(prefix.size(), 8));
        const std::string leaf = name.substr(prefix.size() + 9);
        auto& d = devs[addr];
        d.dev_addr = addr;
        d.time = k.timestamp;
        if (leaf == "snr")
            d.snr_db = v;
        else if (leaf == "sf")
            d.sf = static_cast<int>(v);
        else if (leaf == "tx_power_dbm")
            d.tx_power_dbm = static_cast<int>(v);
        else if (leaf == "adr")
            d.adr = v != 0;
        else if (leaf == "airtime_s")
            d.airtime_s = v;
        else if (leaf == "fcnt")
            d.fcnt = static_cast<std::uint32_t>(v);
        else if (leaf.rfind("gw/", 0) == 0 && leaf.size() > 7 && leaf.substr(leaf.size() - 4) == "/snr")
            d.gateway_snr[leaf.substr(3, leaf.size() - 7)] = v;
    }
    std::vector<DeviceUplink> out;
    for (auto& [a, d] : devs)
        out.push_back(std::move(d));
    return out;
}

nlohmann::json kpi_to_json(const KpiRecord& k)
{
    return {{"node_id", k.node_id}, {"timestamp_ns", k.timestamp}, {"metrics", k.metrics}};
}

KpiRecord kpi_from_json(const nlohmann::json& j)
{
    try {
        KpiRecord k;
        k.node_id = j.at("node_id").get<std::string>();
        k.timestamp = j.at("timestamp_ns").get<SimTime>();
        k.metrics = j.at("metrics").get<std::map<std::string, double>>();
        return k;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Parse, std::string("KPI record: ") + e.what());
    }
}

void write_kpi_archive(const std::filesystem::path& path, const std::vector<KpiRecord>& records)
{
    std::ofstream out(path);
    if (!out)
        raise(ErrorKind::Io, "cannot write " + path.string());
    for (const auto& r : records)
        out << kpi_to_json(r).dump() << '\n';
}

std::vector<KpiRecord> read_kpi_archive(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::Io, "cannot read " + path.string());
    std::vector<KpiRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        try {
            out.push_back(kpi_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorKind::Parse, path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

bool policy_covers(const A1Policy& p, std::uint32_t dev_addr)
{
    if (!p.body.contains("devices"))
        return true;
    const auto hex = mac::dev_addr_hex(dev_addr);
    for (const auto& d : p.body["devices"])
        if (d.get<std::string>() == hex)
            return true;
    return false;
}

namespace {

ControlCommand adr_control(const std::string& ns, std::uint32_t dev, const du::AdrCommand& c)
{
    return {ns, "device/" + mac::dev_addr_hex(dev) + "/adr", {{"sf", c.sf}, {"tx_power_dbm", c.tx_power_dbm}}, 0};
}

}  // namespace

du::AdrCommand clamp(const du::AdrCommand& cmd, const SfBounds& b)
{
    return {std::clamp(cmd.sf, b.min_sf, b.max_sf), cmd.tx_power_dbm};
}

// sf adjustment

std::vector<ControlCommand> SfAdjustmentXApp::on_indication(const KpiRecord& kpi, SimTime)
{
    std::vector<ControlCommand> out;
    for (const auto& u : device_uplinks(kpi)) {
        if (!u.adr)
            continue;
        auto [it, fresh] = trackers_.try_emplace(u.dev_addr);
        const auto cmd = it->second.on_uplink(u.snr_db, u.sf, u.tx_power_dbm);
        if (!cmd)
            continue;
        unclamped_[u.dev_addr] = *cmd;
        const auto b = bounds_for(u.dev_addr);
        out.push_back(adr_control(ns_, u.dev_addr, b ? clamp(*cmd, *b) : *cmd));
    }
    return out;
}

void SfAdjustmentXApp::on_policies(const std::vector<A1Policy>& active)
{
    bounds_.clear();
    for (const auto& p : active)
        if (p.type == PolicyType::SfBounds)
            bounds_.push_back(p);
}

std::optional<SfBounds> SfAdjustmentXApp::bounds_for(std::uint32_t dev_addr) const
{
    std::optional<SfBounds> b;
    for (const auto& p : bounds_) {
        if (!policy_covers(p, dev_addr))
            continue;
        if (!b)
            b = SfBounds{};
        b->min_sf = std::max(b->min_sf, p.body["min_sf"].get<int>());
        b->max_sf = std::min(b->max_sf, p.body["max_sf"].get<int>());
    }
    // Disjoint policies: the later minimum wins so the result stays a valid range.
    if (b && b->min_sf > b->max_sf)
        b->max_sf = b->min_sf;
    return b;
}

// gateway steering

GatewaySteeringXApp::GatewaySteeringXApp(std::string ns_node)
    : ns_(std::move(ns_node)),
      hysteresis_db_(config::constants().steering_hysteresis_db),
      window_(static_cast<std::size_t>(config::constants().steering_window))
{
}

std::optional<double> GatewaySteeringXApp::rolling_mean(std::uint32_t dev_addr, const std::string& gw) const
{
    auto d = devices_.find(dev_addr);
    if (d == devices_.end())
        return std::nullopt;
    auto g = d->second.snr.find(gw);
    if (g == d->second.snr.end() || g->second.empty())
        return std::nullopt;
    double sum = 0;
    for (double x : g->second)
        sum += x;
    return sum / static_cast<double>(g->second.size());
}

std::optional<std::string> GatewaySteeringXApp::steered(std::uint32_t dev_addr) const
{
    auto d = devices_.find(dev_addr);
    return d == devices_.end() ? std::nullopt : d->second.steered;
}

std::vector<ControlCommand> GatewaySteeringXApp::on_indication(const KpiRecord& kpi, SimTime)
{
    std::vector<ControlCommand> out;
    for (const auto& u : device_uplinks(kpi)) {
        auto& st = devices_[u.dev_addr];
        for (const auto& [gw, snr] : u.gateway_snr) {
            auto& q = st.snr[gw];
            q.push_back(snr);
            while (q.size() > window_)
                q.pop_front();
        }
        if (u.gateway_snr.size() < 2)
            continue;
        // Incumbent: the standing override when it heard this uplink, else the
        // per-uplink choice the NS would make (argmax snr, smallest id on ties).
        std::string incumbent;
        if (st.steered && u.gateway_snr.count(*st.steered)) {
            incumbent = *st.steered;
        } else {
            double best = -1e300;
            for (const auto& [gw, snr] : u.gateway_snr)
                if (snr > best) {
                    best = snr;
                    incumbent = gw;
                }
        }
        std::string candidate;
        double cand_mean = -1e300;
        for (const auto& [gw, snr] : u.gateway_snr) {
            const double m = *rolling_mean(u.dev_addr, gw);
            if (m > cand_mean) {
                cand_mean = m;
                candidate = gw;
            }
        }
        if (candidate == incumbent || cand_mean - *rolling_mean(u.dev_addr, incumbent) < hysteresis_db_)
            continue;
        st.steered = candidate;
        out.push_back({ns_, "device/" + mac::dev_addr_hex(u.dev_addr) + "/dl_gateway", candidate, 0});
    }
    return out;
}

// energy forecast

double uplink_energy_j(double airtime_s, int tx_power_dbm, const config::ConstantsRegistry& c)
{
    return airtime_s * c.tx_current_ma(tx_power_dbm) * 1e-3 * c.device_supply_voltage_v;
}

EnergyForecastXApp::EnergyForecastXApp(std::string ns_node) : ns_(std::move(ns_node)) {}

void EnergyForecastXApp::on_policies(const std::vector<A1Policy>& active)
{
    energy_.clear();
    for (const auto& p : active)
        if (p.type == PolicyType::EnergySaving)
            energy_.push_back(p);
}

double EnergyForecastXApp::lifetime_threshold_days(std::uint32_t dev_addr) const
{
    for (const auto& p : energy_)
        if (policy_covers(p, dev_addr) && p.body.contains("lifetime_threshold_days"))
            return p.body["lifetime_threshold_days"].get<double>();
    return config::constants().energy_lifetime_threshold_days;
}

EnergyEstimate EnergyForecastXApp::estimate_of(std::uint32_t dev, const DeviceState& s) const
{
    const auto& c = config::constants();
    EnergyEstimate e;
    e.dev_addr = dev;
    e.uplinks = s.uplinks;
    e.energy_j = s.energy_j;
    e.mean_uplink_j = s.uplinks ? s.energy_j / static_cast<double>(s.uplinks) : 0;
    e.remaining_j = std::max(0.0, c.battery_capacity_j() - s.energy_j);
    e.battery_pct = 100.0 * e.remaining_j / c.battery_capacity_j();
    if (s.last > s.first) {
        e.rate_j_per_s = s.energy_after_first_j / to_seconds(s.last - s.first);
        if (e.rate_j_per_s > 0)
            e.lifetime_days = e.remaining_j / e.rate_j_per_s / 86400.0;
    }
    return e;
}

std::optional<EnergyEstimate> EnergyForecastXApp::estimate(std::uint32_t dev_addr) const
{
    auto it = devices_.find(dev_addr);
    if (it == devices_.end())
        return std::nullopt;
    return estimate_of(dev_addr, it->second);
}

std::vector<EnergyEstimate> EnergyForecastXApp::report() const
{
    std::vector<EnergyEstimate> out;
    for (const auto& [a, s] : devices_)
        out.push_back(estimate_of(a, s));
    return out;
}

std::vector<ControlCommand> EnergyForecastXApp::on_indication(const KpiRecord& kpi, SimTime)
{
    const auto& c = config::constants();
    const auto min_history = static_cast<std::size_t>(c.energy_min_history);
    std::vector<ControlCommand> out;
    for (const auto& u : device_uplinks(kpi)) {
        auto& s = devices_[u.dev_addr];
        const double e = uplink_energy_j(u.airtime_s, u.tx_power_dbm, c);
        if (s.uplinks == 0)
            s.first = u.time;
        else
            s.energy_after_first_j += e;
        s.last = u.time;
        ++s.uplinks;
        s.energy_j += e;
        s.snr.push_back(u.snr_db);
        while (s.snr.size() > min_history)
            s.snr.pop_front();
        ++s.since_command;
        if (s.uplinks < min_history || s.since_command < static_cast<int>(min_history))
            continue;

        const auto est = estimate_of(u.dev_addr, s);
        int cap = c.device_max_tx_power_dbm;
        for (const auto& p : energy_)
            if (policy_covers(p, u.dev_addr))
                cap = std::min(cap, p.body["max_tx_power_dbm"].get<int>());
        int target = u.tx_power_dbm;
        if (u.tx_power_dbm > cap) {
            // Round down to a device power level.
            target = c.device_max_tx_power_dbm -
                     ((c.device_max_tx_power_dbm - cap + c.adr_power_step_db - 1) / c.adr_power_step_db) * c.adr_power_step_db;
            target = std::max(target, c.device_min_tx_power_dbm);
        } else if (est.lifetime_days && *est.lifetime_days < lifetime_threshold_days(u.dev_addr)) {
            const std::vector<double> hist(s.snr.begin(), s.snr.end());
            if (du::adr_margin_db(hist, u.sf, c) >= c.adr_power_step_db &&
                u.tx_power_dbm - c.adr_power_step_db >= c.device_min_tx_power_dbm)
                target = u.tx_power_dbm - c.adr_power_step_db;
        }
        if (target == u.tx_power_dbm)
            continue;
        s.since_command = 0;
        s.snr.clear();
        out.push_back(adr_control(ns_, u.dev_addr, {u.sf, target}));
    }
    return out;
}

// energy-efficiency rApp

std::optional<RappReport> rapp_energy_efficiency(const std::vector<KpiRecord>& archive, const config::ConstantsRegistry& c)
{
    RappReport r;
    int max_power = c.device_min_tx_power_dbm;
    std::size_t uplinks = 0;
    std::map<std::uint32_t, double> per_device;
    for (const auto& k : archive) {
        for (const auto& u : device_uplinks(k)) {
            if (u.airtime_s <= 0)
                continue;
            const double e = uplink_energy_j(u.airtime_s, u.tx_power_dbm, c);
            r.energy_by_sf[u.sf] += e;
            r.total_energy_j += e;
            per_device[u.dev_addr] += e;
            max_power = std::max(max_power, u.tx_power_dbm);
            ++uplinks;
        }
    }
    if (uplinks == 0)
        return std::nullopt;
    const double high = (r.energy_by_sf.count(11) ? r.energy_by_sf[11] : 0) + (r.energy_by_sf.count(12) ? r.energy_by_sf[12] : 0);
    r.high_sf_share = high / r.total_energy_j;

    nlohmann::json by_sf = nlohmann::json::object();
    for (const auto& [sf, e] : r.energy_by_sf)
        by_sf[std::to_string(sf)] = e;
    r.rationale = {{"uplinks", uplinks},
                   {"devices", per_device.size()},
                   {"total_energy_j", r.total_energy_j},
                   {"energy_by_sf_j", by_sf},
                   {"high_sf_share", r.high_sf_share},
                   {"threshold", c.rapp_high_sf_energy_share}};
    if (r.high_sf_share > c.rapp_high_sf_energy_share) {
        const int cap = std::min(max_power, c.device_max_tx_power_dbm);
        char text[160];
        std::snprintf(text, sizeof text, "sf11/sf12 airtime carries %.1f%% of fleet transmit energy (threshold %.0f%%); review an sf cap of 10",
                      100 * r.high_sf_share, 100 * c.rapp_high_sf_energy_share);
        A1Policy p;
        p.policy_id = "rapp-energy-saving";
        p.type = PolicyType::EnergySaving;
        p.body = {{"max_tx_power_dbm", cap}, {"max_sf", 10}, {"rationale", text}};
        const auto v = check_policy(p.type, p.body);
        if (!v.empty())
            raise(ErrorKind::Consistency, "rApp draft fails its schema: " + config::format_violations(v));
        r.draft = std::move(p);
        r.rationale["recommendation"] = "sf cap review";
    } else {
        r.rationale["recommendation"] = "none";
    }
    return r;
}

}  // namespace olrw::ric
