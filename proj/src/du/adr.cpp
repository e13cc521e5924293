/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/du/adr.hpp"

#include <algorithm>

#include "olrw/common/error.hpp"

namespace olrw::du {

double adr_margin_db(std::span<const double> snr_history, int sf, const config::ConstantsRegistry& c)
{
    if (snr_history.empty())
        raise(ErrorKind::Range, "ADR needs at least one uplink of history");
    const double best = *std::max_element(snr_history.begin(), snr_history.end());
    return best - c.required_snr_db(sf) - c.adr_margin_db;
}

std::optional<AdrCommand> adr_propose(std::span<const double> snr_history, int sf, int tx_power_dbm,
                                      const config::ConstantsRegistry& c)
{
    const double margin = adr_margin_db(snr_history, sf, c);
    int steps = static_cast<int>(margin / c.adr_step_db);
    AdrCommand cmd{sf, tx_power_dbm};
    while (steps > 0 && cmd.sf > config::kMinSf) {
        --cmd.sf;
        --steps;
    }
    while (steps > 0 && cmd.tx_power_dbm - c.adr_power_step_db >= c.device_min_tx_power_dbm) {
        cmd.tx_power_dbm -= c.adr_power_step_db;
        --steps;
    }
    while (steps < 0 && cmd.tx_power_dbm + c.adr_power_step_db <= c.device_max_tx_power_dbm) {
        cmd.tx_power_dbm += c.adr_power_step_db;
        ++steps;
    }
    while (steps < 0 && cmd.sf < config::kMaxSf) {
        ++cmd.sf;
        ++steps;
    }
    if (cmd.sf == sf && cmd.tx_power_dbm == tx_power_dbm)
        return std::nullopt;
    return cmd;
}

std::optional<AdrCommand> AdrTracker::on_uplink(double snr_db, int sf, int tx_power_dbm)
{
    history_.push_back(snr_db);
    while (static_cast<int>(history_.size()) > c_->adr_history_len)
        history_.pop_front();
    ++since_command_;
    if (static_cast<int>(history_.size()) < c_->adr_min_history)
        return std::nullopt;
    if (commanded_ && since_command_ < c_->adr_command_interval_uplinks)
        return std::nullopt;
    const std::vector<double> h(history_.begin(), history_.end());
    auto cmd = adr_propose(h, sf, tx_power_dbm, *c_);
    if (cmd) {
        history_.clear();
        since_command_ = 0;
        commanded_ = true;
    }
    return cmd;
}

void AdrTracker::reset()
{
    history_.clear();
    since_command_ = 0;
    commanded_ = false;
}

}  // namespace olrw::du
