/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/config/constants.hpp"

#include <fstream>
#include <sstream>

#include "olrw/common/error.hpp"
#include "olrw/embedded_constants.hpp"

namespace olrw::config {

using nlohmann::json;

std::optional<std::size_t> ChannelPlan::sub_band_of(std::uint32_t hz) const
{
    for (std::size_t i = 0; i < sub_bands.size(); ++i)
        if (hz >= sub_bands[i].min_hz && hz <= sub_bands[i].max_hz)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> ChannelPlan::channel_index_of(std::uint32_t hz) const
{
    for (std::size_t i = 0; i < uplink_hz.size(); ++i)
        if (uplink_hz[i] == hz)
            return i;
    return std::nullopt;
}

double ConstantsRegistry::tx_current_ma(int tx_power_dbm) const
{
    auto it = device_tx_current_ma.lower_bound(tx_power_dbm);
    if (it == device_tx_current_ma.end())
        return device_tx_current_ma.rbegin()->second;
    return it->second;
}

namespace {

class Loader {
public:
    explicit Loader(const json& root) : root_(root)
    {
        if (!root.is_object() || root.value("format", "") != "olrw-constants/1")
            fail("", "missing or unsupported format tag");
        if (!root.contains("constants") || !root["constants"].is_object())
            fail("constants", "missing constants object");
    }

    const json& value(const std::string& name)
    {
        const auto& c = root_["constants"];
        if (!c.contains(name))
            fail(name, "missing constant");
        const auto& entry = c[name];
        if (!entry.is_object() || !entry.contains("value") || !entry.contains("source"))
            fail(name, "entry needs value and source");
        std::string src = entry["source"].get<std::string>();
        if (src != "architecture" && src != "decision")
            fail(name, "source tag must be architecture or decision");
        sources_[name] = src;
        return entry["value"];
    }

    double num(const std::string& name)
    {
        const auto& v = value(name);
        if (!v.is_number())
            fail(name, "expected number");
        return v.get<double>();
    }

    int integer(const std::string& name)
    {
        const auto& v = value(name);
        if (!v.is_number_integer())
            fail(name, "expected integer");
        return v.get<int>();
    }

    template <typename T>
    SfTable<T> sf_table(const std::string& name, const json& v)
    {
        if (!v.is_object() || v.size() != kSfCount)
            fail(name, "sf table must have exactly the keys 7..12");
        SfTable<T> t;
        for (int sf = kMinSf; sf <= kMaxSf; ++sf) {
            auto key = std::to_string(sf);
            if (!v.contains(key) || !v[key].is_number())
                fail(name, "sf table missing numeric entry for sf" + key);
            t[sf] = v[key].get<T>();
        }
        return t;
    }

    [[noreturn]] void fail(const std::string& name, const std::string& why)
    {
        raise(ErrorKind::Validation, "constants: " + (name.empty() ? std::string("<root>") : name) + ": " + why);
    }

    std::map<std::string, std::string> sources_;

private:
    const json& root_;
};

}  // namespace

ConstantsRegistry load_constants(std::string_view json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        raise(ErrorKind::Validation, std::string("constants: malformed document: ") + e.what());
    }

    Loader l(root);
    ConstantsRegistry r;
    try {
        r.adr_margin_db = l.num("adr_margin_db");
        r.adr_required_snr_db = l.sf_table<double>("adr_required_snr_db", l.value("adr_required_snr_db"));
        r.adr_step_db = l.num("adr_step_db");
        r.adr_power_step_db = l.integer("adr_power_step_db");
        r.adr_min_history = l.integer("adr_min_history");
        r.adr_history_len = l.integer("adr_history_len");
        r.adr_command_interval_uplinks = l.integer("adr_command_interval_uplinks");
        r.device_max_tx_power_dbm = l.integer("device_max_tx_power_dbm");
        r.device_min_tx_power_dbm = l.integer("device_min_tx_power_dbm");
        const auto& dl = l.value("dl_tx_power_range_dbm");
        r.dl_tx_power_min_dbm = dl.at(0).get<int>();
        r.dl_tx_power_max_dbm = dl.at(1).get<int>();
        r.gateway_tx_power_dbm = l.integer("gateway_tx_power_dbm");
        r.duty_cycle_limit = l.num("duty_cycle_limit");
        r.duty_cycle_window_s = l.num("duty_cycle_window_s");
        r.max_app_payload_octets = l.sf_table<int>("max_app_payload_octets", l.value("max_app_payload_octets"));

        const auto& cur = l.value("device_tx_current_ma");
        for (auto it = cur.begin(); it != cur.end(); ++it)
            r.device_tx_current_ma[std::stoi(it.key())] = it.value().get<double>();
        if (r.device_tx_current_ma.empty())
            l.fail("device_tx_current_ma", "empty table");
        r.device_supply_voltage_v = l.num("device_supply_voltage_v");
        r.device_battery_capacity_mah = l.num("device_battery_capacity_mah");
        r.capture_threshold_db = l.num("capture_threshold_db");

        const auto& rej = l.value("cross_sf_rejection_db");
        if (!rej.is_object() || rej.size() != kSfCount)
            l.fail("cross_sf_rejection_db", "rows must be exactly sf 7..12");
        for (int sf = kMinSf; sf <= kMaxSf; ++sf)
            r.cross_sf_rejection_db[sf] =
                l.sf_table<double>("cross_sf_rejection_db", rej.at(std::to_string(sf)));

        const auto& plan = l.value("channel_plan");
        r.channel_plan.uplink_hz = plan.at("uplink_hz").get<std::vector<std::uint32_t>>();
        r.channel_plan.rx2_hz = plan.at("rx2_hz").get<std::uint32_t>();
        r.channel_plan.rx2_sf = plan.at("rx2_sf").get<int>();
        r.channel_plan.bw_hz = plan.at("bw_hz").get<std::uint32_t>();
        for (const auto& b : plan.at("sub_bands"))
            r.channel_plan.sub_bands.push_back(
                {b.at("name").get<std::string>(), b.at("min_hz").get<std::uint32_t>(), b.at("max_hz").get<std::uint32_t>()});
        if (r.channel_plan.uplink_hz.empty())
            l.fail("channel_plan", "no uplink channels");

        const auto& cm = l.value("channel_model");
        r.channel_model.path_loss_exponent = cm.at("path_loss_exponent").get<double>();
        r.channel_model.reference_loss_db = cm.at("reference_loss_db").get<double>();
        r.channel_model.reference_distance_m = cm.at("reference_distance_m").get<double>();
        r.channel_model.noise_figure_db = cm.at("noise_figure_db").get<double>();

        r.rx1_delay_s = l.num("rx1_delay_s");
        r.rx2_delay_s = l.num("rx2_delay_s");
        r.dedup_window_ms = l.integer("dedup_window_ms");
        r.du_retry_queue_capacity = l.integer("du_retry_queue_capacity");
        r.ns_dl_lead_ms = l.integer("ns_dl_lead_ms");
        r.backhaul_latency_ms = l.integer("backhaul_latency_ms");
        r.gateway_internal_latency_us = l.integer("gateway_internal_latency_us");
        const auto& band = l.value("near_rt_band_ms");
        r.near_rt_min_ms = band.at(0).get<int>();
        r.near_rt_max_ms = band.at(1).get<int>();
        r.e2_link_latency_ms = l.integer("e2_link_latency_ms");
        r.xapp_processing_ms = l.integer("xapp_processing_ms");
        r.ric_control_period_ms = l.integer("ric_control_period_ms");
        r.steering_hysteresis_db = l.num("steering_hysteresis_db");
        r.steering_window = l.integer("steering_window");
        r.energy_min_history = l.integer("energy_min_history");
        r.energy_lifetime_threshold_days = l.num("energy_lifetime_threshold_days");
        r.rapp_high_sf_energy_share = l.num("rapp_high_sf_energy_share");
        r.lorawan_version_code = l.integer("lorawan_version_code");
        r.adc_bits = l.integer("adc_bits");
        r.sensitivity_gate_db = l.num("sensitivity_gate_db");
    } catch (const json::exception& e) {
        raise(ErrorKind::Validation, std::string("constants: bad entry: ") + e.what());
    }

    if (r.rx2_delay_s <= r.rx1_delay_s || r.rx1_delay_s <= 0)
        l.fail("rx2_delay_s", "need rx2_delay_s > rx1_delay_s > 0");
    if (r.duty_cycle_limit <= 0 || r.duty_cycle_limit > 1)
        l.fail("duty_cycle_limit", "must lie in (0, 1]");

    // Every constant in the document must be consumed and tagged.
    for (auto it = root["constants"].begin(); it != root["constants"].end(); ++it)
        if (!l.sources_.count(it.key()))
            l.fail(it.key(), "unknown constant");

    r.sources = std::move(l.sources_);
    r.schemas = root.value("schemas", json::object());
    return r;
}

ConstantsRegistry load_constants_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::Io, "cannot open constants file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return load_constants(ss.str());
}

const ConstantsRegistry& constants()
{
    static const ConstantsRegistry registry = load_constants(detail::kEmbeddedConstants);
    return registry;
}

}  // namespace olrw::config
