/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "olrw/common/bytes.hpp"
#include "olrw/common/kpi.hpp"

namespace olrw::ric {

/// Message taxonomy after E2AP: subscription, indication and control procedures.
enum class E2Kind : std::uint8_t {
    SubscriptionReq = 1,
    SubscriptionResp = 2,
    SubscriptionFail = 3,
    Indication = 4,
    ControlReq = 5,
    ControlAck = 6,
    ControlFail = 7,
    ReportReq = 8,
};
const char* to_string(E2Kind k);

struct ControlCommand {
    std::string target;  ///< node id
    std::string path;    ///< control dictionary path
    nlohmann::json value;
    SimTime deadline = 0;

    bool operator==(const ControlCommand&) const = default;
};

/// One E2 message. Fields not used by a kind stay empty.
struct E2Message {
    E2Kind kind = E2Kind::Indication;
    std::uint32_t transaction_id = 0;
    std::string node_id;
    std::optional<std::uint32_t> subscription_id;
    std::optional<std::string> xapp_id;
    std::optional<SimTime> period;     ///< subscription trigger; 0 means per event
    std::optional<SimTime> timestamp;  ///< indication time or control application time
    std::optional<KpiRecord> kpi;
    std::optional<ControlCommand> control;
    std::optional<std::string> cause;

    bool operator==(const E2Message&) const = default;
};

// TLV tags. Every TLV is tag u8, length u16 (big-endian), value.
enum class E2Tag : std::uint8_t {
    NodeId = 0x01,
    SubscriptionId = 0x02,
    XappId = 0x03,
    Period = 0x04,
    Timestamp = 0x05,
    KpiNode = 0x10,
    KpiTimestamp = 0x11,
    Metric = 0x12,  ///< name octets followed by an IEEE-754 binary64, big-endian
    CtrlTarget = 0x20,
    CtrlPath = 0x21,
    CtrlValue = 0x22,  ///< compact JSON text
    CtrlDeadline = 0x23,
    Cause = 0x30,
};

/// kind u8, transaction id u32, then TLVs in ascending tag order; metrics sorted by name.
Bytes encode_e2(const E2Message& m);
/// Truncation throws Length; unknown kinds or tags and repeated tags throw Format.
E2Message decode_e2(ByteView b);

/// Node-side E2 endpoint wrapping a component's report and control surfaces.
class E2Agent {
public:
    using ReportFn = std::function<KpiRecord(SimTime)>;
    using ControlFn = std::function<void(const std::string& path, const nlohmann::json& value)>;

    E2Agent(std::string node_id, ReportFn report, ControlFn control);

    const std::string& node_id() const { return node_id_; }

    /// Handles one request. SUBSCRIPTION_REQ is answered with a response carrying a fresh
    /// subscription id; CONTROL_REQ is applied and acknowledged (or failed on an invalid
    /// path, value or a passed deadline); REPORT_REQ yields an immediate indication.
    std::optional<E2Message> handle(const E2Message& req, SimTime now);

    /// Periodic indications due at `now`, one per subscription whose period elapsed.
    std::vector<E2Message> due_indications(SimTime now);
    /// Earliest periodic indication time.
    std::optional<SimTime> next_due() const;

    /// Event-triggered indications (period 0 subscriptions) for a KPI produced by the node.
    std::vector<E2Message> event_indications(const KpiRecord& kpi);

    std::uint64_t controls_applied() const { return applied_; }
    std::uint64_t controls_failed() const { return failed_; }
    std::uint64_t deadline_misses() const { return deadline_misses_; }

private:
    struct Subscription {
        std::string xapp_id;
        SimTime period = 0;
        SimTime next = 0;
    };

    std::string node_id_;
    ReportFn report_;
    ControlFn control_;
    std::map<std::uint32_t, Subscription> subs_;
    std::uint32_t next_sub_ = 1;
    std::uint64_t applied_ = 0;
    std::uint64_t failed_ = 0;
    std::uint64_t deadline_misses_ = 0;
};

}  // namespace olrw::ric
