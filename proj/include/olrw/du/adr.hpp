/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <deque>
#include <optional>
#include <span>

#include "olrw/config/constants.hpp"

namespace olrw::du {

struct AdrCommand {
    int sf = 12;
    int tx_power_dbm = 14;

    bool operator==(const AdrCommand&) const = default;
};

/// margin = max(snr) - required(sf) - adr_margin_db, stepped in adr_step_db units
/// truncated toward zero. Positive steps lower sf to 7, then power to the floor;
/// negative steps raise power to the ceiling, then sf to 12. Empty when nothing changes.
std::optional<AdrCommand> adr_propose(std::span<const double> snr_history, int sf, int tx_power_dbm,
                                      const config::ConstantsRegistry& c = config::constants());

/// Margin in dB for a history (max snr based).
double adr_margin_db(std::span<const double> snr_history, int sf, const config::ConstantsRegistry& c = config::constants());

/// Per-device history and rate limit shared by the NS and the sf-adjustment xApp,
/// so both paths see the same proposals for the same uplinks.
class AdrTracker {
public:
    explicit AdrTracker(const config::ConstantsRegistry& c = config::constants()) : c_(&c) {}

    /// Records one uplink and returns a command when one is due. The history is
    /// cleared whenever a command is issued.
    std::optional<AdrCommand> on_uplink(double snr_db, int sf, int tx_power_dbm);

    const std::deque<double>& history() const { return history_; }
    int uplinks_since_command() const { return since_command_; }
    void reset();

private:
    const config::ConstantsRegistry* c_;
    std::deque<double> history_;
    int since_command_ = 0;
    bool commanded_ = false;
};

}  // namespace olrw::du
