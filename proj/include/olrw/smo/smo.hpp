/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <functional>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "olrw/common/kpi.hpp"
#include "olrw/common/time.hpp"

namespace olrw::ru {
class RadioUnit;
}
namespace olrw::du {
class DistributedUnit;
}
namespace olrw::ns {
class NetworkServer;
}
namespace olrw::ric {
struct RicConfig;
}

namespace olrw::smo {

enum class NodeKind { Ru, Du, Ns, Ric };

const char* to_string(NodeKind k);
/// "ru", "du", "ns", "ric"; anything else throws Validation.
NodeKind node_kind_from(std::string_view s);

/// O1 view of one managed element. The callbacks are the element's management
/// surface: full read-back, delta apply, KPI report.
struct ManagedNode {
    std::string id;  ///< "<kind>:<name>", e.g. "du:gw1"
    NodeKind kind = NodeKind::Du;
    std::function<nlohmann::json()> read_config;
    std::function<void(const nlohmann::json&)> apply_config;
    std::function<KpiRecord(SimTime)> report;
};

ManagedNode managed(const std::string& name, ru::RadioUnit& ru);
ManagedNode managed(const std::string& name, du::DistributedUnit& du);
ManagedNode managed(const std::string& name, ns::NetworkServer& ns);
/// The RIC has no KPI report of its own; `on_change` runs after every apply.
ManagedNode managed(const std::string& name, ric::RicConfig& cfg,
                    std::function<void(const ric::RicConfig&)> on_change = {});

struct ConfigDocument {
    std::string target;
    int schema_version = 1;
    std::string document_id;
    nlohmann::json parameters = nlohmann::json::object();

    bool operator==(const ConfigDocument&) const = default;
};

nlohmann::json to_json(const ConfigDocument& d);
/// Validates against o1.document and the target kind's schema; throws Validation
/// listing every offending path.
ConfigDocument config_document_from(const nlohmann::json& j);

enum class AckStatus { Applied, Unchanged, Deferred, RolledBack };
const char* to_string(AckStatus s);

struct ConfigAck {
    std::string target;
    std::string document_id;
    AckStatus status = AckStatus::Applied;
    std::uint64_t applied_version = 0;
    SimTime time = 0;
};

nlohmann::json to_json(const ConfigAck& a);

enum class Severity { Critical, Major, Minor, Warning };
const char* to_string(Severity s);
Severity severity_from(std::string_view s);

struct FaultEvent {
    std::string node;
    Severity severity = Severity::Major;
    std::string code;
    std::string description;
    SimTime timestamp = 0;
    bool cleared = false;

    bool operator==(const FaultEvent&) const = default;
};

nlohmann::json to_json(const FaultEvent& f);
FaultEvent fault_from_json(const nlohmann::json& j);

struct ActiveFault {
    std::string node;
    std::string code;
    Severity severity = Severity::Major;
    std::uint64_t count = 0;
    SimTime first_raised = 0;
    SimTime last_raised = 0;
};

enum class Lifecycle { Active, Decommissioned };

struct InventoryEntry {
    std::string id;
    NodeKind kind = NodeKind::Du;
    Lifecycle state = Lifecycle::Active;
    bool online = true;
    std::uint64_t applied_version = 0;
    std::size_t deferred = 0;
    SimTime registered_at = 0;
};

struct KpiSnapshot {
    SimTime window_start = 0;
    SimTime window_end = 0;
    std::map<std::string, KpiRecord> records;  ///< reporting nodes online at collection
    std::map<std::string, double> uptime;      ///< every active node
    std::map<std::string, double> totals;      ///< sum over records per metric name
};

nlohmann::json to_json(const KpiSnapshot& s);

using FaultSubscriber = std::function<void(const FaultEvent&)>;

/// O1-lite management plane. Pushes to one node are serialized; distinct nodes do
/// not contend.
class Smo {
public:
    /// REGISTER. A known id, decommissioned or not, throws Conflict.
    void register_node(ManagedNode node, SimTime now = 0);
    /// DECOMMISSION. Unknown ids throw NotFound; the node stops receiving config.
    void decommission(const std::string& id, SimTime now = 0);
    std::vector<InventoryEntry> inventory() const;
    InventoryEntry inventory(const std::string& id) const;

    /// Pushes a validated document. Offline targets queue it (status Deferred).
    /// Decommissioned targets throw State; a read-back mismatch restores the previous
    /// values and throws Consistency.
    ConfigAck apply(const ConfigDocument& doc, SimTime now);
    /// Parses and validates first.
    ConfigAck apply(const nlohmann::json& doc, SimTime now);
    /// Restores the values the latest applied document replaced, returning to the
    /// previous version. Nothing to undo throws State.
    ConfigAck rollback(const std::string& id, SimTime now);
    /// Documents applied to a node, oldest first, still eligible for rollback.
    std::vector<ConfigDocument> history(const std::string& id) const;

    /// Marks a node reachable or not. Coming online retries its deferred documents in order.
    std::vector<ConfigAck> set_online(const std::string& id, bool online, SimTime now);
    /// Retries deferred documents of a reachable node.
    std::vector<ConfigAck> retry(const std::string& id, SimTime now);

    /// Appends to the fault log and forwards to subscribers. A clear without an active
    /// raise, or a timestamp earlier than the node's last event, throws Consistency.
    void fault(const FaultEvent& ev);
    int subscribe(FaultSubscriber fn);
    void unsubscribe(int token);
    const std::vector<FaultEvent>& fault_log() const { return faults_; }
    std::vector<ActiveFault> active_faults() const;

    /// Reports from every active, reachable node plus uptime over [start, end].
    /// A node is down while a CRITICAL or MAJOR fault is active or it is unreachable.
    KpiSnapshot collect_kpis(SimTime window_start, SimTime window_end);
    double uptime(const std::string& id, SimTime window_start, SimTime window_end) const;

    void write_fault_log(const std::filesystem::path& path) const;

private:
    struct Applied {
        ConfigDocument doc;
        std::uint64_t version = 0;
        nlohmann::json previous;  ///< values of the touched keys before the apply
    };
    struct Entry {
        ManagedNode node;
        Lifecycle state = Lifecycle::Active;
        bool online = true;
        SimTime registered_at = 0;
        std::uint64_t version = 0;
        std::uint64_t next_version = 1;
        std::vector<Applied> history;
        std::vector<ConfigDocument> deferred;
        std::vector<std::pair<SimTime, bool>> reachability;  ///< (time, online) transitions
        std::mutex mu;
    };

    Entry& entry(const std::string& id) const;
    ConfigAck apply_locked(Entry& e, const ConfigDocument& doc, SimTime now);
    std::vector<ConfigAck> drain_locked(Entry& e, SimTime now);
    InventoryEntry describe(const Entry& e) const;

    mutable std::mutex mu_;  // guards the node map and fault state
    std::map<std::string, std::unique_ptr<Entry>> nodes_;
    std::vector<FaultEvent> faults_;
    std::map<std::pair<std::string, std::string>, ActiveFault> active_;
    std::map<std::string, SimTime> last_fault_time_;
    std::map<int, FaultSubscriber> subscribers_;
    int next_token_ = 1;
};

}  // namespace olrw::smo
