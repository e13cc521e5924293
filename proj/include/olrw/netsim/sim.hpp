/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <compare>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "olrw/common/bytes.hpp"
#include "olrw/netsim/scenario.hpp"

namespace olrw::netsim {

struct RunOptions {
    std::optional<Mode> mode;           ///< overrides the scenario mode
    std::optional<std::uint64_t> seed;  ///< overrides the scenario seed
    bool keep_trace = false;            ///< keep the event trace lines in the result
};

/// One frame delivered to the application server.
struct Delivered {
    std::uint32_t dev_addr = 0;
    std::uint32_t fcnt = 0;
    Bytes payload;

    auto operator<=>(const Delivered&) const = default;
};

/// Fronthaul frame as it crossed the RU-DU link.
struct CaptureRecord {
    SimTime time = 0;
    bool downlink = false;
    std::string gateway_id;
    Bytes frame;

    bool operator==(const CaptureRecord&) const = default;
};

/// Capture file contents: the frames in simulation order, in the fronthaul capture
/// format (read back with fronthaul::decode_capture).
Bytes capture_file(const std::vector<CaptureRecord>& records);

struct SimResult {
    nlohmann::json report;
    std::vector<Delivered> delivered;  ///< sorted
    std::vector<CaptureRecord> capture;
    std::vector<std::string> audit_failures;
    std::vector<std::string> trace;  ///< "<time_ns> <event>" lines when requested
    std::uint64_t trace_digest = 0;

    bool ok() const { return audit_failures.empty(); }
};

/// Runs a scenario to completion. Deterministic in (scenario, seed, mode).
SimResult run_scenario(const Scenario& sc, const RunOptions& opt = {});

/// Stable text of a report (two-space indent, trailing newline).
std::string report_text(const nlohmann::json& report);

/// ADR end state the registry predicts for a link: repeated proposals on the noiseless
/// snr from `sf`/`tx_power_dbm` until none is issued.
std::pair<int, int> predicted_adr_terminal(double d_m, int sf, int tx_power_dbm,
                                           const config::ChannelModel& m = config::constants().channel_model);

}  // namespace olrw::netsim
