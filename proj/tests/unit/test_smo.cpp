/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "olrw/common/error.hpp"
#include "olrw/du/du.hpp"
#include "olrw/ns/ns.hpp"
#include "olrw/phy/chain.hpp"
#include "olrw/ric/ric.hpp"
#include "olrw/ru/ru.hpp"
#include "olrw/smo/smo.hpp"

using namespace olrw;
using namespace olrw::smo;
using nlohmann::json;

namespace {

json doc(const std::string& target, const std::string& id, json params)
{
    return {{"target", target}, {"schema_version", 1}, {"document_id", id}, {"parameters", std::move(params)}};
}

ErrorKind kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::State;
}

/// Observable DU behavior under a config: RX window times for a fixed uplink and the
/// outcome of a fixed burst of sf12 downlinks on the RX2 channel.
std::vector<std::int64_t> du_trace(const du::DuConfig& cfg)
{
    du::DistributedUnit probe("probe", cfg);
    std::vector<std::int64_t> t;
    const auto w = probe.rx_windows(from_seconds(100), 868300000, 9);
    t.push_back(w.rx1.time);
    t.push_back(w.rx2.time);
    t.push_back(w.rx2.sf);
    const Bytes mac(30, 0x42);
    for (int i = 0; i < 40; ++i) {
        try {
            probe.build_downlink(mac, {7, 12, 869525000, 14, from_seconds(200 + 3 * i)});
            t.push_back(1);
        } catch (const Error& e) {
            t.push_back(e.kind() == ErrorKind::DutyCycle ? 0 : -1);
        }
    }
    return t;
}

}  // namespace

TEST_CASE("lifecycle and inventory")
{
    du::DistributedUnit d("gw1");
    Smo smo;
    CHECK(smo.inventory().empty());
    smo.register_node(managed("gw1", d), 5);
    const auto inv = smo.inventory();
    REQUIRE(inv.size() == 1);
    CHECK(inv[0].id == "du:gw1");
    CHECK(inv[0].kind == NodeKind::Du);
    CHECK(inv[0].state == Lifecycle::Active);
    CHECK(inv[0].registered_at == 5);
    CHECK(kind_of([&] { smo.register_node(managed("gw1", d)); }) == ErrorKind::Conflict);

    smo.decommission("du:gw1");
    CHECK(smo.inventory("du:gw1").state == Lifecycle::Decommissioned);
    CHECK(kind_of([&] { smo.apply(doc("du:gw1", "d1", {{"duty_cycle_limit", 0.001}}), 10); }) == ErrorKind::State);
    CHECK(d.config().duty_cycle_limit == 0.01);
    CHECK(kind_of([&] { smo.register_node(managed("gw1", d)); }) == ErrorKind::Conflict);
    CHECK(kind_of([&] { smo.decommission("du:nope"); }) == ErrorKind::NotFound);

    auto bad = managed("gw2", d);
    bad.id = "ru:gw2";
    CHECK(kind_of([&] { smo.register_node(bad); }) == ErrorKind::Validation);
}

TEST_CASE("config push: schema rejection lists paths")
{
    du::DistributedUnit d("gw1");
    Smo smo;
    smo.register_node(managed("gw1", d));
    try {
        smo.apply(doc("du:gw1", "x", {{"duty_cycle_limt", 0.01}, {"rx2_sf", 13}}), 0);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        const std::string msg = e.what();
        CHECK(msg.find("/parameters/duty_cycle_limt") != std::string::npos);
        CHECK(msg.find("/parameters/rx2_sf") != std::string::npos);
    }
    json missing = doc("du:gw1", "x", json::object());
    missing.erase("document_id");
    CHECK(kind_of([&] { smo.apply(missing, 0); }) == ErrorKind::Validation);
    CHECK(kind_of([&] { smo.apply(doc("gw1", "x", json::object()), 0); }) == ErrorKind::Validation);
    json v2 = doc("du:gw1", "x", json::object());
    v2["schema_version"] = 2;
    CHECK(kind_of([&] { smo.apply(v2, 0); }) == ErrorKind::Validation);
    CHECK(kind_of([&] { smo.apply(doc("du:gw9", "x", json::object()), 0); }) == ErrorKind::NotFound);
    CHECK(smo.inventory("du:gw1").applied_version == 0);
}

TEST_CASE("duty-cycle limit pushed over O1 is enforced")
{
    du::DistributedUnit d("gw1");
    Smo smo;
    smo.register_node(managed("gw1", d));
    const auto ack = smo.apply(doc("du:gw1", "duty-0.001", {{"duty_cycle_limit", 0.001}}), 0);
    CHECK(ack.status == AckStatus::Applied);
    CHECK(ack.applied_version == 1);
    CHECK(d.config().duty_cycle_limit == 0.001);

    const Bytes mac(30, 0x42);
    const double air = phy::airtime_s(phy::PhyParams::make(12, 125000, 1, 8, false), mac.size());
    const int fit = static_cast<int>(3.6 / air);  // 0.1% of an hour
    int ok = 0;
    for (int i = 0; i < fit + 5; ++i) {
        try {
            d.build_downlink(mac, {7, 12, 869525000, 14, from_seconds(10 + 3 * i)});
            ++ok;
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DutyCycle);
        }
    }
    CHECK(ok == fit);
    CHECK(d.duty().used_s(1, from_seconds(10 + 3 * (fit + 5))) <= 3.6);
}

TEST_CASE("idempotence, read-back and rollback")
{
    du::DistributedUnit d("gw1");
    Smo smo;
    smo.register_node(managed("gw1", d));
    const auto base_cfg = du::to_json(d.config());
    const auto base_trace = du_trace(d.config());

    const json change = {{"duty_cycle_limit", 0.002}, {"rx1_delay_s", 1.5}, {"rx2_sf", 10}};
    const auto a1 = smo.apply(doc("du:gw1", "tune-1", change), 0);
    CHECK(a1.status == AckStatus::Applied);
    const auto cfg1 = du::to_json(d.config());
    const auto trace1 = du_trace(d.config());
    CHECK(trace1 != base_trace);

    // Same document again: same version, no behavioral diff.
    const auto a2 = smo.apply(doc("du:gw1", "tune-1", change), 1);
    CHECK(a2.status == AckStatus::Unchanged);
    CHECK(a2.applied_version == a1.applied_version);
    CHECK(du::to_json(d.config()) == cfg1);
    CHECK(du_trace(d.config()) == trace1);
    CHECK(smo.history("du:gw1").size() == 1);
    // Reusing an id for different content is a conflict.
    CHECK(kind_of([&] { smo.apply(doc("du:gw1", "tune-1", {{"rx2_sf", 11}}), 2); }) == ErrorKind::Conflict);

    // Read-back agrees with every leaf of the document.
    const auto rb = du::to_json(d.config());
    for (auto it = change.begin(); it != change.end(); ++it)
        CHECK(rb[it.key()] == it.value());

    const auto a3 = smo.apply(doc("du:gw1", "tune-2", {{"rx2_sf", 11}}), 3);
    CHECK(a3.applied_version == 2);
    auto r = smo.rollback("du:gw1", 4);
    CHECK(r.status == AckStatus::RolledBack);
    CHECK(r.applied_version == 1);
    CHECK(du::to_json(d.config()) == cfg1);
    r = smo.rollback("du:gw1", 5);
    CHECK(r.applied_version == 0);
    // Config diff against the original is empty and the behavior trace matches.
    CHECK(json::diff(base_cfg, du::to_json(d.config())).empty());
    CHECK(du_trace(d.config()) == base_trace);
    CHECK(kind_of([&] { smo.rollback("du:gw1", 6); }) == ErrorKind::State);
    // Versions keep increasing after a rollback.
    CHECK(smo.apply(doc("du:gw1", "tune-3", {{"rx2_sf", 9}}), 7).applied_version == 3);
}

TEST_CASE("read-back mismatch is not acknowledged")
{
    json state = {{"dedup_window_ms", 200}, {"adr_enabled", false}};
    ManagedNode liar{"ns:lossy", NodeKind::Ns, [&] { return state; },
                     [&](const json& j) {
                         for (auto it = j.begin(); it != j.end(); ++it)
                             if (it.key() != "adr_enabled")
                                 state[it.key()] = it.value();
                     },
                     {}};
    Smo smo;
    smo.register_node(liar);
    CHECK(kind_of([&] { smo.apply(doc("ns:lossy", "n1", {{"adr_enabled", true}, {"dedup_window_ms", 400}}), 0); }) ==
          ErrorKind::Consistency);
    CHECK(state["dedup_window_ms"] == 200);
    CHECK(smo.inventory("ns:lossy").applied_version == 0);
}

TEST_CASE("offline node: deferral and retry")
{
    ns::NetworkServer n;
    Smo smo;
    smo.register_node(managed("core", n));
    CHECK(smo.set_online("ns:core", false, from_seconds(1)).empty());
    auto ack = smo.apply(doc("ns:core", "w1", {{"dedup_window_ms", 300}}), from_seconds(2));
    CHECK(ack.status == AckStatus::Deferred);
    ack = smo.apply(doc("ns:core", "w2", {{"adr_enabled", true}}), from_seconds(3));
    CHECK(ack.status == AckStatus::Deferred);
    CHECK(n.config().dedup_window_ms == 200);
    CHECK(smo.inventory("ns:core").deferred == 2);
    CHECK(smo.retry("ns:core", from_seconds(4)).empty());

    const auto acks = smo.set_online("ns:core", true, from_seconds(5));
    REQUIRE(acks.size() == 2);
    CHECK(acks[0].document_id == "w1");
    CHECK(acks[0].applied_version == 1);
    CHECK(acks[1].document_id == "w2");
    CHECK(acks[1].applied_version == 2);
    CHECK(n.config().dedup_window_ms == 300);
    CHECK(n.config().adr_enabled);
    CHECK(smo.inventory("ns:core").deferred == 0);
}

TEST_CASE("all node kinds accept their documents")
{
    ru::RadioUnit r("gw1", ru::RuConfig{});
    du::DistributedUnit d("gw1");
    ns::NetworkServer n;
    ric::RicConfig rc;
    int changes = 0;
    Smo smo;
    smo.register_node(managed("gw1", r));
    smo.register_node(managed("gw1", d));
    smo.register_node(managed("core", n));
    smo.register_node(managed("ric", rc, [&](const ric::RicConfig&) { ++changes; }));
    CHECK(smo.apply(doc("ru:gw1", "r1", {{"noise_figure_db", 4.5}, {"sf_set", {7, 8, 9}}}), 0).status ==
          AckStatus::Applied);
    CHECK(r.config().noise_figure_db == 4.5);
    CHECK(smo.apply(doc("ric:ric", "x1", {{"gateway_steering", true}}), 0).status == AckStatus::Applied);
    CHECK(rc.gateway_steering);
    CHECK(changes == 1);
    CHECK(kind_of([&] { smo.apply(doc("ric:ric", "x2", {{"dedup_window_ms", 3}}), 0); }) == ErrorKind::Validation);
    CHECK(smo.inventory().size() == 4);
}

TEST_CASE("fault log")
{
    du::DistributedUnit d("gw1");
    Smo smo;
    smo.register_node(managed("gw1", d));
    std::vector<FaultEvent> seen;
    const int tok = smo.subscribe([&](const FaultEvent& f) { seen.push_back(f); });

    SUBCASE("raise then clear")
    {
        smo.fault({"du:gw1", Severity::Major, "LINK_DOWN", "fronthaul lost", 10, false});
        CHECK(smo.active_faults().size() == 1);
        smo.fault({"du:gw1", Severity::Major, "LINK_DOWN", "", 20, true});
        CHECK(smo.active_faults().empty());
        CHECK(smo.fault_log().size() == 2);
        CHECK(seen.size() == 2);
    }
    SUBCASE("two raises of one code")
    {
        smo.fault({"du:gw1", Severity::Minor, "HIGH_TEMP", "", 10, false});
        smo.fault({"du:gw1", Severity::Minor, "HIGH_TEMP", "", 11, false});
        const auto a = smo.active_faults();
        REQUIRE(a.size() == 1);
        CHECK(a[0].count == 2);
        CHECK(a[0].first_raised == 10);
        CHECK(a[0].last_raised == 11);
    }
    SUBCASE("clear without raise")
    {
        CHECK(kind_of([&] { smo.fault({"du:gw1", Severity::Major, "LINK_DOWN", "", 10, true}); }) ==
              ErrorKind::Consistency);
        CHECK(smo.fault_log().empty());
        CHECK(seen.empty());
    }
    SUBCASE("ordered per node and append-only")
    {
        smo.fault({"du:gw1", Severity::Warning, "A", "", 50, false});
        CHECK(kind_of([&] { smo.fault({"du:gw1", Severity::Warning, "B", "", 49, false}); }) ==
              ErrorKind::Consistency);
        smo.fault({"du:gw1", Severity::Warning, "B", "", 50, false});
        REQUIRE(smo.fault_log().size() == 2);
        CHECK(smo.fault_log()[0].code == "A");
        CHECK(kind_of([&] { smo.fault({"du:zz", Severity::Warning, "A", "", 60, false}); }) == ErrorKind::NotFound);
    }
    SUBCASE("unsubscribe and json round trip")
    {
        smo.unsubscribe(tok);
        const FaultEvent f{"du:gw1", Severity::Critical, "PA_FAIL", "power amplifier", 77, false};
        smo.fault(f);
        CHECK(seen.empty());
        CHECK(fault_from_json(to_json(f)) == f);
        CHECK(kind_of([] { severity_from("FATAL"); }) == ErrorKind::Validation);
        const auto path = std::filesystem::temp_directory_path() / "olrw_faults.jsonl";
        smo.write_fault_log(path);
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        CHECK(fault_from_json(json::parse(line)) == f);
        std::filesystem::remove(path);
    }
}

TEST_CASE("KPI collection and uptime")
{
    ru::RadioUnit r("gw1", ru::RuConfig{});
    du::DistributedUnit d("gw1");
    ns::NetworkServer n;
    Smo smo;
    smo.register_node(managed("gw1", r));
    smo.register_node(managed("gw1", d));
    smo.register_node(managed("core", n));

    SUBCASE("idle network")
    {
        const auto s = smo.collect_kpis(0, from_seconds(60));
        CHECK(s.records.size() == 3);
        for (const auto& [id, u] : s.uptime)
            CHECK(u == 1.0);
        for (const auto key : {"uplinks", "downlinks", "merged"})
            if (s.totals.count(key))
                CHECK(s.totals.at(key) == 0.0);
    }
    SUBCASE("totals are the sum of node records")
    {
        const auto s = smo.collect_kpis(0, from_seconds(60));
        std::map<std::string, double> sum;
        for (const auto& [id, rec] : s.records)
            for (const auto& [k, v] : rec.metrics)
                sum[k] += v;
        CHECK(sum == s.totals);
    }
    SUBCASE("half the window faulted")
    {
        smo.fault({"du:gw1", Severity::Critical, "FH_DOWN", "", from_seconds(30), false});
        smo.fault({"du:gw1", Severity::Warning, "NOISE", "", from_seconds(31), false});
        CHECK(smo.uptime("du:gw1", 0, from_seconds(60)) == doctest::Approx(0.5));
        smo.fault({"du:gw1", Severity::Critical, "FH_DOWN", "", from_seconds(90), true});
        CHECK(smo.uptime("du:gw1", 0, from_seconds(120)) == doctest::Approx(0.5));
        CHECK(smo.uptime("du:gw1", from_seconds(60), from_seconds(120)) == doctest::Approx(0.5));
        CHECK(smo.uptime("ru:gw1", 0, from_seconds(120)) == 1.0);
        // A warning alone does not take the node down.
        CHECK(smo.uptime("du:gw1", from_seconds(100), from_seconds(120)) == 1.0);
    }
    SUBCASE("unreachable time counts as down, overlapping faults once")
    {
        smo.set_online("ns:core", false, from_seconds(10));
        smo.fault({"ns:core", Severity::Major, "DB", "", from_seconds(15), false});
        smo.set_online("ns:core", true, from_seconds(20));
        smo.fault({"ns:core", Severity::Major, "DB", "", from_seconds(25), true});
        CHECK(smo.uptime("ns:core", 0, from_seconds(60)) == doctest::Approx(45.0 / 60.0));
        smo.set_online("ns:core", false, from_seconds(30));
        const auto s = smo.collect_kpis(0, from_seconds(60));
        CHECK(s.records.count("ns:core") == 0);
        CHECK(s.uptime.at("ns:core") == doctest::Approx(15.0 / 60.0));
    }
    SUBCASE("decommissioned nodes leave the snapshot")
    {
        smo.decommission("ru:gw1");
        const auto s = smo.collect_kpis(0, from_seconds(60));
        CHECK(s.records.count("ru:gw1") == 0);
        CHECK(s.uptime.count("ru:gw1") == 0);
        CHECK(to_json(s)["nodes"].size() == 2);
    }
}
