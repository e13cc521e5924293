/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/smo/smo.hpp"

#include <algorithm>
#include <fstream>

#include "olrw/common/error.hpp"
#include "olrw/config/schema.hpp"
#include "olrw/du/du.hpp"
#include "olrw/ns/ns.hpp"
#include "olrw/ric/ric.hpp"
#include "olrw/ru/ru.hpp"

namespace olrw::smo {

using nlohmann::json;

const char* to_string(NodeKind k)
{
    switch (k) {
    case NodeKind::Ru: return "ru";
    case NodeKind::Du: return "du";
    case NodeKind::Ns: return "ns";
    case NodeKind::Ric: return "ric";
    }
    return "?";
}

NodeKind node_kind_from(std::string_view s)
{
    for (auto k : {NodeKind::Ru, NodeKind::Du, NodeKind::Ns, NodeKind::Ric})
        if (s == to_string(k))
            return k;
    raise(ErrorKind::Validation, "unknown node kind '" + std::string(s) + "'");
}

ManagedNode managed(const std::string& name, ru::RadioUnit& r)
{
    return {"ru:" + name, NodeKind::Ru, [&r] { return ru::to_json(r.config()); },
            [&r](const json& d) { r.apply_config(d); }, [&r](SimTime now) { return r.report(now); }};
}

ManagedNode managed(const std::string& name, du::DistributedUnit& d)
{
    return {"du:" + name, NodeKind::Du, [&d] { return du::to_json(d.config()); },
            [&d](const json& j) { d.apply_config(j); }, [&d](SimTime now) { return d.report(now); }};
}

ManagedNode managed(const std::string& name, ns::NetworkServer& n)
{
    return {"ns:" + name, NodeKind::Ns, [&n] { return ns::to_json(n.config()); },
            [&n](const json& j) { n.apply_config(j); }, [&n](SimTime now) { return n.report(now); }};
}

ManagedNode managed(const std::string& name, ric::RicConfig& cfg, std::function<void(const ric::RicConfig&)> on_change)
{
    ManagedNode m;
    m.id = "ric:" + name;
    m.kind = NodeKind::Ric;
    m.read_config = [&cfg] { return ric::to_json(cfg); };
    m.apply_config = [&cfg, on_change](const json& j) {
        cfg = ric::merge(cfg, j);
        if (on_change)
            on_change(cfg);
    };
    return m;
}

json to_json(const ConfigDocument& d)
{
    return {{"target", d.target}, {"schema_version", d.schema_version}, {"document_id", d.document_id},
            {"parameters", d.parameters}};
}

ConfigDocument config_document_from(const json& j)
{
    auto v = config::validate_schema(j, "o1.document");
    if (v.empty()) {
        const auto target = j["target"].get<std::string>();
        const auto kind = target.substr(0, target.find(':'));
        for (auto x : config::validate_schema(j["parameters"], "o1." + kind)) {
            x.path = "/parameters" + x.path;
            v.push_back(std::move(x));
        }
    }
    if (!v.empty())
        raise(ErrorKind::Validation, "config document rejected: " + config::format_violations(v));
    ConfigDocument d;
    d.target = j["target"].get<std::string>();
    d.schema_version = j["schema_version"].get<int>();
    d.document_id = j["document_id"].get<std::string>();
    d.parameters = j["parameters"];
    return d;
}

const char* to_string(AckStatus s)
{
    switch (s) {
    case AckStatus::Applied: return "applied";
    case AckStatus::Unchanged: return "unchanged";
    case AckStatus::Deferred: return "deferred";
    case AckStatus::RolledBack: return "rolled_back";
    }
    return "?";
}

json to_json(const ConfigAck& a)
{
    return {{"target", a.target}, {"document_id", a.document_id}, {"status", to_string(a.status)},
            {"applied_version", a.applied_version}, {"time_ns", a.time}};
}

const char* to_string(Severity s)
{
    switch (s) {
    case Severity::Critical: return "CRITICAL";
    case Severity::Major: return "MAJOR";
    case Severity::Minor: return "MINOR";
    case Severity::Warning: return "WARNING";
    }
    return "?";
}

Severity severity_from(std::string_view s)
{
    for (auto v : {Severity::Critical, Severity::Major, Severity::Minor, Severity::Warning})
        if (s == to_string(v))
            return v;
    raise(ErrorKind::Validation, "invalid severity '" + std::string(s) + "'");
}

json to_json(const FaultEvent& f)
{
    return {{"node", f.node},           {"severity", to_string(f.severity)}, {"code", f.code},
            {"description", f.description}, {"timestamp_ns", f.timestamp},   {"cleared", f.cleared}};
}

FaultEvent fault_from_json(const json& j)
{
    try {
        FaultEvent f;
        f.node = j.at("node").get<std::string>();
        f.severity = severity_from(j.at("severity").get<std::string>());
        f.code = j.at("code").get<std::string>();
        f.description = j.value("description", "");
        f.timestamp = j.at("timestamp_ns").get<SimTime>();
        f.cleared = j.value("cleared", false);
        return f;
    } catch (const json::exception& e) {
        raise(ErrorKind::Parse, std::string("fault event: ") + e.what());
    }
}

json to_json(const KpiSnapshot& s)
{
    json nodes = json::object();
    for (const auto& [id, r] : s.records)
        nodes[id] = {{"timestamp_ns", r.timestamp}, {"metrics", r.metrics}};
    return {{"window_start_ns", s.window_start}, {"window_end_ns", s.window_end}, {"nodes", nodes},
            {"uptime", s.uptime}, {"totals", s.totals}};
}

// Smo

namespace {

bool leaf_equal(const json& a, const json& b)
{
    if (a.is_number() && b.is_number())
        return std::abs(a.get<double>() - b.get<double>()) <= 1e-9 * std::max(1.0, std::abs(a.get<double>()));
    return a == b;
}

/// Keys of `want` whose value differs in `have`.
std::vector<std::string> readback_mismatch(const json& want, const json& have)
{
    std::vector<std::string> bad;
    for (auto it = want.begin(); it != want.end(); ++it) {
        if (!have.contains(it.key())) {
            bad.push_back(it.key());
            continue;
        }
        const auto& h = have[it.key()];
        const auto& w = it.value();
        bool same = w.is_array() && h.is_array() && w.size() == h.size();
        if (same) {
            for (std::size_t i = 0; i < w.size(); ++i)
                same = same && leaf_equal(w[i], h[i]);
        } else if (!w.is_array()) {
            same = leaf_equal(w, h);
        }
        if (!same)
            bad.push_back(it.key());
    }
    return bad;
}

bool service_affecting(Severity s) { return s == Severity::Critical || s == Severity::Major; }

}  // namespace

Smo::Entry& Smo::entry(const std::string& id) const
{
    std::lock_guard lock(mu_);
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        raise(ErrorKind::NotFound, "node '" + id + "' not in inventory");
    return *it->second;
}

void Smo::register_node(ManagedNode node, SimTime now)
{
    if (!node.read_config || !node.apply_config)
        raise(ErrorKind::Validation, "node '" + node.id + "' lacks a management surface");
    const auto colon = node.id.find(':');
    if (colon == std::string::npos || node_kind_from(node.id.substr(0, colon)) != node.kind)
        raise(ErrorKind::Validation, "node id '" + node.id + "' must be <kind>:<name> matching its kind");
    std::lock_guard lock(mu_);
    if (nodes_.count(node.id))
        raise(ErrorKind::Conflict, "node '" + node.id + "' already registered");
    auto e = std::make_unique<Entry>();
    e->node = std::move(node);
    e->registered_at = now;
    e->reachability.push_back({now, true});
    nodes_.emplace(e->node.id, std::move(e));
}

void Smo::decommission(const std::string& id, SimTime)
{
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    if (e.state == Lifecycle::Decommissioned)
        raise(ErrorKind::State, "node '" + id + "' already decommissioned");
    e.state = Lifecycle::Decommissioned;
    e.deferred.clear();
}

InventoryEntry Smo::describe(const Entry& e) const
{
    return {e.node.id, e.node.kind, e.state, e.online, e.version, e.deferred.size(), e.registered_at};
}

std::vector<InventoryEntry> Smo::inventory() const
{
    std::vector<Entry*> all;
    {
        std::lock_guard lock(mu_);
        for (const auto& [id, e] : nodes_)
            all.push_back(e.get());
    }
    std::vector<InventoryEntry> out;
    for (auto* e : all) {
        std::lock_guard lock(e->mu);
        out.push_back(describe(*e));
    }
    return out;
}

InventoryEntry Smo::inventory(const std::string& id) const
{
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    return describe(e);
}

ConfigAck Smo::apply(const json& doc, SimTime now) { return apply(config_document_from(doc), now); }

ConfigAck Smo::apply(const ConfigDocument& doc, SimTime now)
{
    config_document_from(to_json(doc));  // same checks for documents built in code
    auto& e = entry(doc.target);
    std::lock_guard lock(e.mu);
    if (e.state == Lifecycle::Decommissioned)
        raise(ErrorKind::State, "config push to decommissioned node '" + doc.target + "' refused");
    if (!e.online) {
        e.deferred.push_back(doc);
        return {doc.target, doc.document_id, AckStatus::Deferred, e.version, now};
    }
    return apply_locked(e, doc, now);
}

ConfigAck Smo::apply_locked(Entry& e, const ConfigDocument& doc, SimTime now)
{
    const json before = e.node.read_config();
    if (!e.history.empty() && e.history.back().doc.document_id == doc.document_id) {
        if (e.history.back().doc.parameters != doc.parameters)
            raise(ErrorKind::Conflict, "document id '" + doc.document_id + "' reused with different parameters");
        if (readback_mismatch(doc.parameters, before).empty())
            return {doc.target, doc.document_id, AckStatus::Unchanged, e.version, now};
    }
    json previous = json::object();
    for (auto it = doc.parameters.begin(); it != doc.parameters.end(); ++it)
        if (before.contains(it.key()))
            previous[it.key()] = before[it.key()];

    e.node.apply_config(doc.parameters);
    const auto bad = readback_mismatch(doc.parameters, e.node.read_config());
    if (!bad.empty()) {
        e.node.apply_config(previous);
        std::string keys;
        for (const auto& k : bad)
            keys += (keys.empty() ? "" : ", ") + k;
        raise(ErrorKind::Consistency, "read-back of '" + doc.target + "' disagrees on " + keys);
    }
    e.version = e.next_version++;
    e.history.push_back({doc, e.version, std::move(previous)});
    return {doc.target, doc.document_id, AckStatus::Applied, e.version, now};
}

ConfigAck Smo::rollback(const std::string& id, SimTime now)
{
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    if (e.state == Lifecycle::Decommissioned)
        raise(ErrorKind::State, "node '" + id + "' is decommissioned");
    if (!e.online)
        raise(ErrorKind::State, "node '" + id + "' is unreachable");
    if (e.history.empty())
        raise(ErrorKind::State, "node '" + id + "' has no applied document to roll back");
    const Applied last = e.history.back();
    e.node.apply_config(last.previous);
    const auto bad = readback_mismatch(last.previous, e.node.read_config());
    if (!bad.empty())
        raise(ErrorKind::Consistency, "rollback read-back of '" + id + "' disagrees on " + bad.front());
    e.history.pop_back();
    e.version = e.history.empty() ? 0 : e.history.back().version;
    return {id, last.doc.document_id, AckStatus::RolledBack, e.version, now};
}

std::vector<ConfigDocument> Smo::history(const std::string& id) const
{
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    std::vector<ConfigDocument> out;
    for (const auto& a : e.history)
        out.push_back(a.doc);
    return out;
}

std::vector<ConfigAck> Smo::drain_locked(Entry& e, SimTime now)
{
    std::vector<ConfigAck> acks;
    while (!e.deferred.empty()) {
        acks.push_back(apply_locked(e, e.deferred.front(), now));
        e.deferred.erase(e.deferred.begin());
    }
    return acks;
}

std::vector<ConfigAck> Smo::set_online(const std::string& id, bool online, SimTime now)
{
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    if (e.online != online) {
        if (!e.reachability.empty() && now < e.reachability.back().first)
            raise(ErrorKind::Consistency, "reachability change for '" + id + "' goes back in time");
        e.online = online;
        e.reachability.push_back({now, online});
    }
    if (!online || e.state == Lifecycle::Decommissioned)
        return {};
    return drain_locked(e, now);
}

std::vector<ConfigAck> Smo::retry(const std::string& id, SimTime now)
{
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    if (!e.online)
        return {};
    return drain_locked(e, now);
}

void Smo::fault(const FaultEvent& ev)
{
    std::vector<FaultSubscriber> subs;
    {
        std::lock_guard lock(mu_);
        if (!nodes_.count(ev.node))
            raise(ErrorKind::NotFound, "fault from unknown node '" + ev.node + "'");
        auto lt = last_fault_time_.find(ev.node);
        if (lt != last_fault_time_.end() && ev.timestamp < lt->second)
            raise(ErrorKind::Consistency, "fault for '" + ev.node + "' is older than the node's last event");
        const auto key = std::make_pair(ev.node, ev.code);
        auto it = active_.find(key);
        if (ev.cleared) {
            if (it == active_.end())
                raise(ErrorKind::Consistency, "clear of '" + ev.code + "' on '" + ev.node + "' without a prior raise");
            active_.erase(it);
        } else if (it == active_.end()) {
            active_[key] = {ev.node, ev.code, ev.severity, 1, ev.timestamp, ev.timestamp};
        } else {
            ++it->second.count;
            it->second.last_raised = ev.timestamp;
            it->second.severity = std::min(it->second.severity, ev.severity);
        }
        last_fault_time_[ev.node] = ev.timestamp;
        faults_.push_back(ev);
        for (const auto& [t, fn] : subscribers_)
            subs.push_back(fn);
    }
    for (const auto& fn : subs)
        fn(ev);
}

int Smo::subscribe(FaultSubscriber fn)
{
    std::lock_guard lock(mu_);
    subscribers_[next_token_] = std::move(fn);
    return next_token_++;
}

void Smo::unsubscribe(int token)
{
    std::lock_guard lock(mu_);
    subscribers_.erase(token);
}

std::vector<ActiveFault> Smo::active_faults() const
{
    std::lock_guard lock(mu_);
    std::vector<ActiveFault> out;
    for (const auto& [k, a] : active_)
        out.push_back(a);
    return out;
}

double Smo::uptime(const std::string& id, SimTime start, SimTime end) const
{
    if (end <= start)
        raise(ErrorKind::Range, "KPI window must have positive length");
    auto& e = entry(id);
    std::vector<std::pair<SimTime, SimTime>> down;
    {
        std::lock_guard lock(e.mu);
        for (std::size_t i = 0; i < e.reachability.size(); ++i)
            if (!e.reachability[i].second)
                down.push_back({e.reachability[i].first,
                                i + 1 < e.reachability.size() ? e.reachability[i + 1].first : end});
    }
    {
        std::lock_guard lock(mu_);
        std::map<std::string, std::pair<SimTime, bool>> open;  // code -> (since, affecting)
        for (const auto& f : faults_) {
            if (f.node != id)
                continue;
            auto it = open.find(f.code);
            if (f.cleared) {
                if (it != open.end() && it->second.second)
                    down.push_back({it->second.first, f.timestamp});
                open.erase(f.code);
            } else if (it == open.end()) {
                open[f.code] = {f.timestamp, service_affecting(f.severity)};
            } else if (service_affecting(f.severity) && !it->second.second) {
                it->second = {f.timestamp, true};
            }
        }
        for (const auto& [code, o] : open)
            if (o.second)
                down.push_back({o.first, end});
    }
    for (auto& d : down)
        d = {std::clamp(d.first, start, end), std::clamp(d.second, start, end)};
    std::sort(down.begin(), down.end());
    SimTime lost = 0, cursor = start;
    for (const auto& [a, b] : down) {
        const SimTime from = std::max(a, cursor);
        if (b > from) {
            lost += b - from;
            cursor = b;
        }
    }
    return 1.0 - static_cast<double>(lost) / static_cast<double>(end - start);
}

KpiSnapshot Smo::collect_kpis(SimTime start, SimTime end)
{
    KpiSnapshot s;
    s.window_start = start;
    s.window_end = end;
    for (const auto& inv : inventory()) {
        if (inv.state == Lifecycle::Decommissioned)
            continue;
        s.uptime[inv.id] = uptime(inv.id, start, end);
        auto& e = entry(inv.id);
        std::lock_guard lock(e.mu);
        if (!e.online || !e.node.report)
            continue;
        auto r = e.node.report(end);
        for (const auto& [k, v] : r.metrics)
            s.totals[k] += v;
        s.records.emplace(inv.id, std::move(r));
    }
    return s;
}

void Smo::write_fault_log(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out)
        raise(ErrorKind::Io, "cannot write " + path.string());
    std::lock_guard lock(mu_);
    for (const auto& f : faults_)
        out << to_json(f).dump() << '\n';
}

}  // namespace olrw::smo
