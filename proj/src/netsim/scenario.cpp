/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/netsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "olrw/common/error.hpp"
#include "olrw/config/schema.hpp"
#include "olrw/mac/frame.hpp"
#include "olrw/ns/ns.hpp"

namespace olrw::netsim {

using nlohmann::json;

const char* to_string(Mode m) { return m == Mode::Legacy ? "legacy" : "modular"; }

Mode mode_from(std::string_view s)
{
    if (s == "legacy")
        return Mode::Legacy;
    if (s == "modular")
        return Mode::Modular;
    raise(ErrorKind::Validation, "unknown mode '" + std::string(s) + "' (legacy|modular)");
}

const char* to_string(AdrDriver d)
{
    switch (d) {
    case AdrDriver::None: return "none";
    case AdrDriver::Ns: return "ns";
    case AdrDriver::XApp: return "xapp";
    }
    return "?";
}

double distance_m(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool Scenario::ric_enabled() const
{
    return adr == AdrDriver::XApp || ric.sf_adjustment || ric.gateway_steering || ric.energy_analysis;
}

namespace {

Position position_of(const json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

void collect(std::vector<config::Violation>& out, const std::string& prefix, const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        out.push_back({prefix, e.what()});
    }
}

}  // namespace

Scenario scenario_from_json(const json& j)
{
    auto v = config::validate_schema(j, "netsim.scenario");
    if (!v.empty())
        raise(ErrorKind::Validation, "scenario: " + config::format_violations(v));

    Scenario s;
    s.name = j.value("name", "");
    s.seed = j.value("seed", std::uint64_t{1});
    s.duration_s = j["duration_s"].get<double>();
    s.drain_s = j.value("drain_s", 10.0);
    s.mode = mode_from(j.value("mode", "modular"));
    s.channel = config::constants().channel_model;
    if (j.contains("channel")) {
        const auto& c = j["channel"];
        s.channel.path_loss_exponent = c.value("path_loss_exponent", s.channel.path_loss_exponent);
        s.channel.reference_loss_db = c.value("reference_loss_db", s.channel.reference_loss_db);
        s.channel.reference_distance_m = c.value("reference_distance_m", s.channel.reference_distance_m);
        s.channel.noise_figure_db = c.value("noise_figure_db", s.channel.noise_figure_db);
    }
    const auto adr = j.value("adr", "none");
    s.adr = adr == "ns" ? AdrDriver::Ns : adr == "xapp" ? AdrDriver::XApp : AdrDriver::None;
    if (j.contains("ric"))
        collect(v, "/ric", [&] { s.ric = ric::merge({}, j["ric"]); });
    if (s.adr == AdrDriver::XApp)
        s.ric.sf_adjustment = true;
    if (j.contains("ns")) {
        s.ns = j["ns"];
        collect(v, "/ns", [&] { ns::merge(ns::default_config(), s.ns); });
    }

    if (j.contains("policies"))
        for (std::size_t i = 0; i < j["policies"].size(); ++i) {
            const auto& p = j["policies"][i];
            PolicySpec ps{ric::policy_type_from(p["type"].get<std::string>()), p["id"].get<std::string>(), p["body"],
                          p.value("at_s", 0.0)};
            for (const auto& x : ric::check_policy(ps.type, ps.body))
                v.push_back({"/policies/" + std::to_string(i) + "/body" + x.path, x.message});
            s.policies.push_back(std::move(ps));
        }
    if (j.contains("o1"))
        for (const auto& p : j["o1"])
            s.o1.push_back({p["at_s"].get<double>(), p["document"]});

    std::set<std::string> gw_ids;
    for (std::size_t i = 0; i < j["gateways"].size(); ++i) {
        const auto& g = j["gateways"][i];
        const auto path = "/gateways/" + std::to_string(i);
        GatewaySpec gs;
        gs.id = g["id"].get<std::string>();
        if (!gw_ids.insert(gs.id).second)
            v.push_back({path + "/id", "duplicate gateway id"});
        gs.position = position_of(g["position"]);
        if (g.contains("mode"))
            gs.mode = mode_from(g["mode"].get<std::string>());
        ru::RuConfig base;
        base.noise_figure_db = s.channel.noise_figure_db;
        gs.ru = base;
        gs.du = du::default_config();
        if (g.contains("ru"))
            collect(v, path + "/ru", [&] { gs.ru = ru::merge(base, g["ru"]); });
        if (g.contains("du"))
            collect(v, path + "/du", [&] { gs.du = du::merge(du::default_config(), g["du"]); });
        s.gateways.push_back(std::move(gs));
    }

    std::set<std::uint32_t> addrs;
    const bool commands = s.adr != AdrDriver::None || s.ric_enabled();
    for (std::size_t i = 0; i < j["devices"].size(); ++i) {
        const auto& d = j["devices"][i];
        const auto path = "/devices/" + std::to_string(i);
        DeviceSpec ds;
        ds.dev_addr = mac::dev_addr_from_hex(d["dev_addr"].get<std::string>());
        if (!addrs.insert(ds.dev_addr).second)
            v.push_back({path + "/dev_addr", "duplicate device address"});
        ds.position = position_of(d["position"]);
        ds.period_s = d["period_s"].get<double>();
        if (d.contains("start_s"))
            ds.start_s = d["start_s"].get<double>();
        ds.jitter_s = d.value("jitter_s", 0.0);
        if (ds.jitter_s >= ds.period_s / 2)
            v.push_back({path + "/jitter_s", "must be below half the period"});
        ds.sf = d.value("sf", 7);
        ds.tx_power_dbm = d.value("tx_power_dbm", 14);
        if (ds.tx_power_dbm % 2 != 0)
            v.push_back({path + "/tx_power_dbm", "must be an even power step"});
        ds.confirmed = d.value("confirmed", false);
        ds.payload_octets = d.value("payload_octets", std::size_t{10});
        ds.downlink_every = d.value("downlink_every", 0);
        if (d.contains("channels"))
            ds.channels = d["channels"].get<std::vector<std::uint32_t>>();
        else
            ds.channels = config::constants().channel_plan.uplink_hz;
        for (auto ch : ds.channels)
            if (!config::constants().channel_plan.channel_index_of(ch))
                v.push_back({path + "/channels", "channel " + std::to_string(ch) + " is not an uplink channel"});
        // Room for a LinkADRAns whenever a command source runs; ADR may climb to sf12.
        const std::size_t reserve = commands ? 2 : 0;
        const int worst_sf = s.adr != AdrDriver::None ? config::kMaxSf : ds.sf;
        if (ds.payload_octets + reserve > mac::max_app_payload(worst_sf))
            v.push_back({path + "/payload_octets", "exceeds the sf" + std::to_string(worst_sf) + " limit of " +
                                                       std::to_string(mac::max_app_payload(worst_sf) - reserve)});
        s.devices.push_back(std::move(ds));
    }
    if (!v.empty())
        raise(ErrorKind::Validation, "scenario: " + config::format_violations(v));
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::Io, "cannot read scenario " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        raise(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace olrw::netsim
