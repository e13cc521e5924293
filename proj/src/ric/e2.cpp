/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/ric/e2.hpp"

#include <bit>
#include <set>

#include "olrw/common/error.hpp"

namespace olrw::ric {

const char* to_string(E2Kind k)
{
    switch (k) {
    case E2Kind::SubscriptionReq: return "SUBSCRIPTION_REQ";
    case E2Kind::SubscriptionResp: return "SUBSCRIPTION_RESP";
    case E2Kind::SubscriptionFail: return "SUBSCRIPTION_FAIL";
    case E2Kind::Indication: return "INDICATION";
    case E2Kind::ControlReq: return "CONTROL_REQ";
    case E2Kind::ControlAck: return "CONTROL_ACK";
    case E2Kind::ControlFail: return "CONTROL_FAIL";
    case E2Kind::ReportReq: return "REPORT_REQ";
    }
    return "?";
}

namespace {

void tlv(ByteWriter& w, E2Tag tag, ByteView value)
{
    if (value.size() > 0xFFFF)
        raise(ErrorKind::Length, "E2 TLV value exceeds 65535 octets");
    w.u8(static_cast<std::uint8_t>(tag));
    w.u16(static_cast<std::uint16_t>(value.size()));
    w.bytes(value);
}

void tlv_str(ByteWriter& w, E2Tag tag, const std::string& s)
{
    tlv(w, tag, ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void tlv_u32(ByteWriter& w, E2Tag tag, std::uint32_t v)
{
    ByteWriter b;
    b.u32(v);
    tlv(w, tag, b.take());
}

void tlv_i64(ByteWriter& w, E2Tag tag, std::int64_t v)
{
    ByteWriter b;
    b.u64(static_cast<std::uint64_t>(v));
    tlv(w, tag, b.take());
}

std::string as_string(ByteView v) { return std::string(v.begin(), v.end()); }

std::uint64_t as_u64(ByteView v, std::size_t width)
{
    if (v.size() != width)
        raise(ErrorKind::Format, "E2 integer TLV has length " + std::to_string(v.size()));
    std::uint64_t x = 0;
    for (auto b : v)
        x = x << 8 | b;
    return x;
}

bool valid_kind(std::uint8_t k) { return k >= 1 && k <= 8; }

}  // namespace

Bytes encode_e2(const E2Message& m)
{
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(m.kind));
    w.u32(m.transaction_id);
    if (!m.node_id.empty())
        tlv_str(w, E2Tag::NodeId, m.node_id);
    if (m.subscription_id)
        tlv_u32(w, E2Tag::SubscriptionId, *m.subscription_id);
    if (m.xapp_id)
        tlv_str(w, E2Tag::XappId, *m.xapp_id);
    if (m.period)
        tlv_i64(w, E2Tag::Period, *m.period);
    if (m.timestamp)
        tlv_i64(w, E2Tag::Timestamp, *m.timestamp);
    if (m.kpi) {
        tlv_str(w, E2Tag::KpiNode, m.kpi->node_id);
        tlv_i64(w, E2Tag::KpiTimestamp, m.kpi->timestamp);
        for (const auto& [name, value] : m.kpi->metrics) {  // std::map: sorted by name
            ByteWriter b;
            b.bytes(ByteView(reinterpret_cast<const std::uint8_t*>(name.data()), name.size()));
            b.u64(std::bit_cast<std::uint64_t>(value));
            tlv(w, E2Tag::Metric, b.take());
        }
    }
    if (m.control) {
        tlv_str(w, E2Tag::CtrlTarget, m.control->target);
        tlv_str(w, E2Tag::CtrlPath, m.control->path);
        tlv_str(w, E2Tag::CtrlValue, m.control->value.dump());
        tlv_i64(w, E2Tag::CtrlDeadline, m.control->deadline);
    }
    if (m.cause)
        tlv_str(w, E2Tag::Cause, *m.cause);
    return w.take();
}

E2Message decode_e2(ByteView b)
{
    ByteReader r(b);
    E2Message m;
    const auto kind = r.u8();
    if (!valid_kind(kind))
        raise(ErrorKind::Format, "unknown E2 message kind " + std::to_string(kind));
    m.kind = static_cast<E2Kind>(kind);
    m.transaction_id = r.u32();
    std::set<std::uint8_t> seen;
    std::optional<std::string> c_target, c_path, c_value;
    std::optional<SimTime> c_deadline;
    while (r.remaining() > 0) {
        const std::size_t at = r.offset();
        const auto tag = r.u8();
        const auto len = r.u16();
        const ByteView v = r.bytes(len);
        if (tag != static_cast<std::uint8_t>(E2Tag::Metric) && !seen.insert(tag).second)
            raise(ErrorKind::Format, "repeated E2 tag at offset " + std::to_string(at));
        switch (static_cast<E2Tag>(tag)) {
        case E2Tag::NodeId: m.node_id = as_string(v); break;
        case E2Tag::SubscriptionId: m.subscription_id = static_cast<std::uint32_t>(as_u64(v, 4)); break;
        case E2Tag::XappId: m.xapp_id = as_string(v); break;
        case E2Tag::Period: m.period = static_cast<SimTime>(as_u64(v, 8)); break;
        case E2Tag::Timestamp: m.timestamp = static_cast<SimTime>(as_u64(v, 8)); break;
        case E2Tag::KpiNode:
            if (!m.kpi)
                m.kpi.emplace();
            m.kpi->node_id = as_string(v);
            break;
        case E2Tag::KpiTimestamp:
            if (!m.kpi)
                m.kpi.emplace();
            m.kpi->timestamp = static_cast<SimTime>(as_u64(v, 8));
            break;
        case E2Tag::Metric: {
            if (v.size() < 8)
                raise(ErrorKind::Format, "short E2 metric at offset " + std::to_string(at));
            if (!m.kpi)
                m.kpi.emplace();
            const auto name = as_string(v.first(v.size() - 8));
            const auto bits = as_u64(v.last(8), 8);
            if (!m.kpi->metrics.emplace(name, std::bit_cast<double>(bits)).second)
                raise(ErrorKind::Format, "repeated E2 metric '" + name + "'");
            break;
        }
        case E2Tag::CtrlTarget: c_target = as_string(v); break;
        case E2Tag::CtrlPath: c_path = as_string(v); break;
        case E2Tag::CtrlValue: c_value = as_string(v); break;
        case E2Tag::CtrlDeadline: c_deadline = static_cast<SimTime>(as_u64(v, 8)); break;
        case E2Tag::Cause: m.cause = as_string(v); break;
        default: raise(ErrorKind::Format, "unknown E2 tag " + std::to_string(tag) + " at offset " + std::to_string(at));
        }
    }
    if (c_target || c_path || c_value || c_deadline) {
        if (!(c_target && c_path && c_value && c_deadline))
            raise(ErrorKind::Format, "incomplete E2 control command");
        ControlCommand c;
        c.target = *c_target;
        c.path = *c_path;
        try {
            c.value = nlohmann::json::parse(*c_value);
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorKind::Format, std::string("E2 control value: ") + e.what());
        }
        c.deadline = *c_deadline;
        m.control = std::move(c);
    }
    return m;
}

E2Agent::E2Agent(std::string node_id, ReportFn report, ControlFn control)
    : node_id_(std::move(node_id)), report_(std::move(report)), control_(std::move(control))
{
}

std::optional<E2Message> E2Agent::handle(const E2Message& req, SimTime now)
{
    E2Message resp;
    resp.transaction_id = req.transaction_id;
    resp.node_id = node_id_;
    switch (req.kind) {
    case E2Kind::SubscriptionReq: {
        if (!req.period || *req.period < 0) {
            resp.kind = E2Kind::SubscriptionFail;
            resp.cause = "missing or negative trigger period";
            return resp;
        }
        const std::uint32_t id = next_sub_++;
        subs_[id] = {req.xapp_id.value_or(""), *req.period, now + *req.period};
        resp.kind = E2Kind::SubscriptionResp;
        resp.subscription_id = id;
        resp.xapp_id = req.xapp_id;
        return resp;
    }
    case E2Kind::ControlReq: {
        resp.timestamp = now;
        if (!req.control) {
            resp.kind = E2Kind::ControlFail;
            resp.cause = "control request without a command";
            ++failed_;
            return resp;
        }
        resp.control = req.control;
        if (now > req.control->deadline) {
            resp.kind = E2Kind::ControlFail;
            resp.cause = "timeout: deadline passed before application";
            ++failed_;
            ++deadline_misses_;
            return resp;
        }
        try {
            control_(req.control->path, req.control->value);
        } catch (const Error& e) {
            resp.kind = E2Kind::ControlFail;
            resp.cause = std::string(to_string(e.kind())) + ": " + e.what();
            ++failed_;
            return resp;
        }
        resp.kind = E2Kind::ControlAck;
        ++applied_;
        return resp;
    }
    case E2Kind::ReportReq:
        resp.kind = E2Kind::Indication;
        resp.timestamp = now;
        resp.kpi = report_(now);
        return resp;
    default:
        return std::nullopt;
    }
}

std::vector<E2Message> E2Agent::due_indications(SimTime now)
{
    std::vector<E2Message> out;
    std::optional<KpiRecord> kpi;
    for (auto& [id, s] : subs_) {
        if (s.period == 0 || s.next > now)
            continue;
        if (!kpi)
            kpi = report_(now);
        E2Message m;
        m.kind = E2Kind::Indication;
        m.node_id = node_id_;
        m.subscription_id = id;
        m.xapp_id = s.xapp_id;
        m.timestamp = now;
        m.kpi = kpi;
        out.push_back(std::move(m));
        while (s.next <= now)
            s.next += s.period;
    }
    return out;
}

std::optional<SimTime> E2Agent::next_due() const
{
    std::optional<SimTime> t;
    for (const auto& [id, s] : subs_)
        if (s.period > 0 && (!t || s.next < *t))
            t = s.next;
    return t;
}

std::vector<E2Message> E2Agent::event_indications(const KpiRecord& kpi)
{
    std::vector<E2Message> out;
    for (const auto& [id, s] : subs_) {
        if (s.period != 0)
            continue;
        E2Message m;
        m.kind = E2Kind::Indication;
        m.node_id = node_id_;
        m.subscription_id = id;
        m.xapp_id = s.xapp_id;
        m.timestamp = kpi.timestamp;
        m.kpi = kpi;
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace olrw::ric
