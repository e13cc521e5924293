/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "olrw/config/constants.hpp"
#include "olrw/du/du.hpp"
#include "olrw/ric/ric.hpp"
#include "olrw/ru/ru.hpp"

namespace olrw::netsim {

/// Legacy: monolithic gateway, RU and DU logic composed in-process without the
/// fronthaul codec. Modular: RU and DU exchange eCPRI frames.
enum class Mode { Legacy, Modular };
const char* to_string(Mode m);
/// "legacy" | "modular"; anything else throws Validation.
Mode mode_from(std::string_view s);

/// Who drives ADR: nobody, the network server, or the sf-adjustment xApp.
enum class AdrDriver { None, Ns, XApp };
const char* to_string(AdrDriver d);

struct Position {
    double x = 0;
    double y = 0;
};

double distance_m(const Position& a, const Position& b);

struct GatewaySpec {
    std::string id;
    Position position;
    std::optional<Mode> mode;  ///< overrides the scenario mode (mixed deployments)
    ru::RuConfig ru;
    du::DuConfig du;
};

struct DeviceSpec {
    std::uint32_t dev_addr = 0;
    Position position;
    double period_s = 60;
    std::optional<double> start_s;  ///< first uplink; drawn from [0, period) when absent
    double jitter_s = 0;
    int sf = 7;
    int tx_power_dbm = 14;
    bool confirmed = false;
    std::size_t payload_octets = 10;
    int downlink_every = 0;  ///< queue application data after every Nth delivered uplink
    std::vector<std::uint32_t> channels;
};

struct PolicySpec {
    ric::PolicyType type = ric::PolicyType::SfBounds;
    std::string id;
    nlohmann::json body;
    double at_s = 0;
};

struct O1Push {
    double at_s = 0;
    nlohmann::json document;
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 1;
    double duration_s = 600;
    double drain_s = 10;  ///< run time after the last uplink may start
    Mode mode = Mode::Modular;
    config::ChannelModel channel;
    AdrDriver adr = AdrDriver::None;
    ric::RicConfig ric;
    nlohmann::json ns = nlohmann::json::object();
    std::vector<PolicySpec> policies;
    std::vector<O1Push> o1;
    std::vector<GatewaySpec> gateways;
    std::vector<DeviceSpec> devices;

    /// Whether a near-RT RIC runs at all.
    bool ric_enabled() const;
};

/// Validates against netsim.scenario plus the cross-field rules (unique ids, payload
/// sizes, node configs). Throws Validation listing every offending path.
Scenario scenario_from_json(const nlohmann::json& j);
/// Parse errors surface as Parse, missing files as Io.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace olrw::netsim
