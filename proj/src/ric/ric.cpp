/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/ric/ric.hpp"

#include <algorithm>

#include "olrw/common/error.hpp"
#include "olrw/config/schema.hpp"

namespace olrw::ric {

nlohmann::json to_json(const RicConfig& c)
{
    return {{"sf_adjustment", c.sf_adjustment}, {"gateway_steering", c.gateway_steering}, {"energy_analysis", c.energy_analysis}};
}

RicConfig merge(const RicConfig& base, const nlohmann::json& delta)
{
    const auto v = config::validate_schema(delta, "o1.ric");
    if (!v.empty())
        raise(ErrorKind::Validation, "ric config: " + config::format_violations(v));
    RicConfig c = base;
    if (delta.contains("sf_adjustment"))
        c.sf_adjustment = delta["sf_adjustment"].get<bool>();
    if (delta.contains("gateway_steering"))
        c.gateway_steering = delta["gateway_steering"].get<bool>();
    if (delta.contains("energy_analysis"))
        c.energy_analysis = delta["energy_analysis"].get<bool>();
    return c;
}

NearRtRic::NearRtRic(const PolicyStore* store, const config::ConstantsRegistry& c) : store_(store), c_(&c) {}

XApp& NearRtRic::add_xapp(std::unique_ptr<XApp> app)
{
    if (xapp(app->id()))
        raise(ErrorKind::Conflict, "xApp '" + app->id() + "' already hosted");
    apps_.push_back(std::move(app));
    return *apps_.back();
}

XApp* NearRtRic::xapp(const std::string& id) const
{
    for (const auto& a : apps_)
        if (a->id() == id)
            return a.get();
    return nullptr;
}

void NearRtRic::connect_node(const std::string& node_id)
{
    if (std::find(nodes_.begin(), nodes_.end(), node_id) == nodes_.end())
        nodes_.push_back(node_id);
}

E2Message NearRtRic::subscribe(const std::string& xapp_id, const std::string& node_id, SimTime period)
{
    if (std::find(nodes_.begin(), nodes_.end(), node_id) == nodes_.end())
        raise(ErrorKind::NotFound, "E2 setup failure: node '" + node_id + "' not connected");
    if (!xapp(xapp_id))
        raise(ErrorKind::NotFound, "xApp '" + xapp_id + "' not hosted");
    E2Message m;
    m.kind = E2Kind::SubscriptionReq;
    m.transaction_id = next_txn_++;
    m.node_id = node_id;
    m.xapp_id = xapp_id;
    m.period = period;
    pending_subs_[m.transaction_id] = xapp_id;
    return m;
}

std::vector<Outgoing> NearRtRic::on_message(const E2Message& msg, SimTime now)
{
    std::vector<Outgoing> out;
    switch (msg.kind) {
    case E2Kind::SubscriptionResp: {
        auto it = pending_subs_.find(msg.transaction_id);
        if (it == pending_subs_.end() || !msg.subscription_id)
            raise(ErrorKind::Consistency, "unexpected subscription response");
        subs_[{msg.node_id, *msg.subscription_id}] = it->second;
        pending_subs_.erase(it);
        break;
    }
    case E2Kind::SubscriptionFail:
        pending_subs_.erase(msg.transaction_id);
        break;
    case E2Kind::Indication: {
        if (!msg.subscription_id || !msg.kpi)
            break;
        auto s = subs_.find({msg.node_id, *msg.subscription_id});
        if (s == subs_.end())
            break;
        XApp* app = xapp(s->second);
        const SimTime ind_time = msg.timestamp.value_or(msg.kpi->timestamp);
        const SimTime send_at = now + static_cast<SimTime>(c_->xapp_processing_ms) * kNsPerMs;
        for (auto cmd : app->on_indication(*msg.kpi, now)) {
            cmd.deadline = ind_time + static_cast<SimTime>(c_->near_rt_max_ms) * kNsPerMs;
            E2Message req;
            req.kind = E2Kind::ControlReq;
            req.transaction_id = next_txn_++;
            req.node_id = cmd.target;
            req.xapp_id = app->id();
            req.control = cmd;
            open_controls_[req.transaction_id] = log_.size();
            log_.push_back({req.transaction_id, app->id(), cmd, ind_time, send_at, std::nullopt, std::nullopt, ""});
            out.push_back({send_at, std::move(req)});
        }
        break;
    }
    case E2Kind::ControlAck:
    case E2Kind::ControlFail: {
        auto it = open_controls_.find(msg.transaction_id);
        if (it == open_controls_.end())
            raise(ErrorKind::Consistency, "control response for unknown or closed transaction " +
                                              std::to_string(msg.transaction_id));
        auto& e = log_[it->second];
        e.acked = msg.kind == E2Kind::ControlAck;
        e.applied_at = msg.timestamp;
        e.cause = msg.cause.value_or("");
        open_controls_.erase(it);
        break;
    }
    default:
        break;
    }
    return out;
}

bool NearRtRic::tick(SimTime)
{
    if (!store_)
        return false;
    const auto rev = store_->revision();
    if (seen_revision_ && *seen_revision_ == rev)
        return false;
    seen_revision_ = rev;
    const auto active = store_->snapshot();
    for (auto& a : apps_)
        a->on_policies(active);
    return true;
}

SimTime NearRtRic::next_tick(SimTime now) const
{
    const SimTime period = static_cast<SimTime>(c_->ric_control_period_ms) * kNsPerMs;
    return (now / period + 1) * period;
}

std::vector<std::string> NearRtRic::audit_latency() const
{
    std::vector<std::string> bad;
    const SimTime lo = static_cast<SimTime>(c_->near_rt_min_ms) * kNsPerMs;
    const SimTime hi = static_cast<SimTime>(c_->near_rt_max_ms) * kNsPerMs;
    for (const auto& e : log_) {
        if (!e.applied_at || !e.acked || !*e.acked) {
            bad.push_back("txn " + std::to_string(e.transaction_id) + " (" + e.xapp_id + " " + e.command.path +
                          ") not applied" + (e.cause.empty() ? "" : ": " + e.cause));
            continue;
        }
        const SimTime d = *e.applied_at - e.indication_time;
        if (d < lo || d > hi)
            bad.push_back("txn " + std::to_string(e.transaction_id) + " applied " + std::to_string(d / 1000) +
                          " us after its indication");
    }
    return bad;
}

}  // namespace olrw::ric
