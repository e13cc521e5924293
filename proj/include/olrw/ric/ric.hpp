/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "olrw/du/adr.hpp"
#include "olrw/ric/a1.hpp"
#include "olrw/ric/e2.hpp"

namespace olrw::ric {

/// Which xApps run; the o1.ric document.
struct RicConfig {
    bool sf_adjustment = false;
    bool gateway_steering = false;
    bool energy_analysis = false;

    bool operator==(const RicConfig&) const = default;
};

nlohmann::json to_json(const RicConfig& c);
/// Unknown keys and bad values throw Validation.
RicConfig merge(const RicConfig& base, const nlohmann::json& delta);

/// Per-device view of one merged uplink, parsed from an NS indication.
struct DeviceUplink {
    std::uint32_t dev_addr = 0;
    double snr_db = 0;
    int sf = 7;
    int tx_power_dbm = 14;
    bool adr = false;
    double airtime_s = 0;
    std::uint32_t fcnt = 0;
    std::map<std::string, double> gateway_snr;
    SimTime time = 0;
};

/// Devices present in an indication (device/<addr>/... metrics), ordered by address.
std::vector<DeviceUplink> device_uplinks(const KpiRecord& k);

nlohmann::json kpi_to_json(const KpiRecord& k);
KpiRecord kpi_from_json(const nlohmann::json& j);
/// Line-delimited KPI archive.
void write_kpi_archive(const std::filesystem::path& path, const std::vector<KpiRecord>& records);
std::vector<KpiRecord> read_kpi_archive(const std::filesystem::path& path);

/// Policies that apply to one device. A policy without a device list covers every device.
bool policy_covers(const A1Policy& p, std::uint32_t dev_addr);

class XApp {
public:
    virtual ~XApp() = default;
    virtual std::string id() const = 0;
    /// Controls to issue for one indication; target and path filled, deadline set by the host.
    virtual std::vector<ControlCommand> on_indication(const KpiRecord& kpi, SimTime now) = 0;
    /// Active policy set, pushed by the host once per control period when it changes.
    virtual void on_policies(const std::vector<A1Policy>& active) { (void)active; }
};

struct SfBounds {
    int min_sf = 7;
    int max_sf = 12;

    bool operator==(const SfBounds&) const = default;
};

/// Clamps the commanded sf into the bounds; power is untouched.
du::AdrCommand clamp(const du::AdrCommand& cmd, const SfBounds& b);

/// Spreading-factor adjustment: the shared ADR rule over NS indications, clamped by
/// SF_BOUNDS policies, issued as device/<addr>/adr controls to the NS.
class SfAdjustmentXApp : public XApp {
public:
    explicit SfAdjustmentXApp(std::string ns_node = "ns") : ns_(std::move(ns_node)) {}
    std::string id() const override { return "sf-adjustment"; }
    std::vector<ControlCommand> on_indication(const KpiRecord& kpi, SimTime now) override;
    void on_policies(const std::vector<A1Policy>& active) override;

    /// Tightest SF_BOUNDS for a device (intersection of covering policies).
    std::optional<SfBounds> bounds_for(std::uint32_t dev_addr) const;
    /// Last unclamped proposal per device, kept for the clamping property.
    const std::map<std::uint32_t, du::AdrCommand>& unclamped() const { return unclamped_; }

private:
    std::string ns_;
    std::map<std::uint32_t, du::AdrTracker> trackers_;
    std::map<std::uint32_t, du::AdrCommand> unclamped_;
    std::vector<A1Policy> bounds_;
};

/// Downlink gateway steering with hysteresis over a rolling snr mean per gateway.
class GatewaySteeringXApp : public XApp {
public:
    explicit GatewaySteeringXApp(std::string ns_node = "ns");
    std::string id() const override { return "gateway-steering"; }
    std::vector<ControlCommand> on_indication(const KpiRecord& kpi, SimTime now) override;

    std::optional<std::string> steered(std::uint32_t dev_addr) const;
    std::optional<double> rolling_mean(std::uint32_t dev_addr, const std::string& gw) const;

private:
    struct DeviceState {
        std::map<std::string, std::deque<double>> snr;
        std::optional<std::string> steered;
    };
    std::string ns_;
    double hysteresis_db_;
    std::size_t window_;
    std::map<std::uint32_t, DeviceState> devices_;
};

/// Energy of one uplink in joules: airtime times supply current times voltage.
double uplink_energy_j(double airtime_s, int tx_power_dbm, const config::ConstantsRegistry& c = config::constants());

struct EnergyEstimate {
    std::uint32_t dev_addr = 0;
    std::uint64_t uplinks = 0;
    double energy_j = 0;
    double mean_uplink_j = 0;
    double rate_j_per_s = 0;
    double remaining_j = 0;
    std::optional<double> lifetime_days;  ///< empty until a drain rate is known
    double battery_pct = 100;
};

/// Battery forecast by linear extrapolation of the observed drain; lowers tx power
/// when the forecast falls below the lifetime threshold and the link margin allows.
class EnergyForecastXApp : public XApp {
public:
    explicit EnergyForecastXApp(std::string ns_node = "ns");
    std::string id() const override { return "energy-forecast"; }
    std::vector<ControlCommand> on_indication(const KpiRecord& kpi, SimTime now) override;
    void on_policies(const std::vector<A1Policy>& active) override;

    std::vector<EnergyEstimate> report() const;
    std::optional<EnergyEstimate> estimate(std::uint32_t dev_addr) const;
    double lifetime_threshold_days(std::uint32_t dev_addr) const;

private:
    struct DeviceState {
        std::uint64_t uplinks = 0;
        double energy_j = 0;
        double energy_after_first_j = 0;
        SimTime first = 0;
        SimTime last = 0;
        std::deque<double> snr;
        int since_command = 0;
    };
    EnergyEstimate estimate_of(std::uint32_t dev, const DeviceState& s) const;

    std::string ns_;
    std::map<std::uint32_t, DeviceState> devices_;
    std::vector<A1Policy> energy_;
};

struct ControlLogEntry {
    std::uint32_t transaction_id = 0;
    std::string xapp_id;
    ControlCommand command;
    SimTime indication_time = 0;
    SimTime issued_at = 0;
    std::optional<SimTime> applied_at;
    std::optional<bool> acked;
    std::string cause;
};

struct Outgoing {
    SimTime send_at = 0;
    E2Message msg;
};

/// Near-RT RIC: E2 termination and xApp host. Event-driven; xApps run one at a time
/// and share no mutable state.
class NearRtRic {
public:
    explicit NearRtRic(const PolicyStore* store = nullptr, const config::ConstantsRegistry& c = config::constants());

    XApp& add_xapp(std::unique_ptr<XApp> app);
    XApp* xapp(const std::string& id) const;

    /// E2 setup for a node.
    void connect_node(const std::string& node_id);
    /// SUBSCRIPTION_REQ for an xApp; an unknown node throws NotFound.
    E2Message subscribe(const std::string& xapp_id, const std::string& node_id, SimTime period);

    /// Handles a message arriving from a node. Indications run the subscribed xApp and
    /// return CONTROL_REQs to send after the processing delay.
    std::vector<Outgoing> on_message(const E2Message& msg, SimTime now);

    /// Policy synchronisation; pushes the active set to every xApp when the store changed.
    bool tick(SimTime now);
    /// Next control-period boundary strictly after `now`.
    SimTime next_tick(SimTime now) const;

    const std::vector<ControlLogEntry>& control_log() const { return log_; }
    /// Controls whose indication-to-application time falls outside [min, max].
    std::vector<std::string> audit_latency() const;

private:
    const PolicyStore* store_;
    const config::ConstantsRegistry* c_;
    std::vector<std::unique_ptr<XApp>> apps_;
    std::vector<std::string> nodes_;
    std::map<std::uint32_t, std::string> pending_subs_;                    // txn -> xapp
    std::map<std::pair<std::string, std::uint32_t>, std::string> subs_;   // (node, sub) -> xapp
    std::map<std::uint32_t, std::size_t> open_controls_;                   // txn -> log index
    std::vector<ControlLogEntry> log_;
    std::uint32_t next_txn_ = 1;
    std::optional<std::uint64_t> seen_revision_;
};

/// Non-RT energy-efficiency rApp output.
struct RappReport {
    double total_energy_j = 0;
    std::map<int, double> energy_by_sf;
    double high_sf_share = 0;
    std::optional<A1Policy> draft;  ///< ENERGY_SAVING draft when the share crosses the threshold
    nlohmann::json rationale;
};

/// Fleet energy distribution over an archive of NS uplink indications. An archive
/// without uplinks is a no-op (nullopt).
std::optional<RappReport> rapp_energy_efficiency(const std::vector<KpiRecord>& archive,
                                                 const config::ConstantsRegistry& c = config::constants());

}  // namespace olrw::ric
