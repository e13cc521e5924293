/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <random>
#include <thread>

#include "doctest.h"
#include "olrw/common/error.hpp"
#include "olrw/du/du.hpp"
#include "olrw/mac/frame.hpp"
#include "olrw/ric/ric.hpp"

using namespace olrw;
using namespace olrw::ric;

namespace {

constexpr SimTime kMs = kNsPerMs;

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Io;
}

/// NS-style per-uplink indication for one device.
KpiRecord uplink(std::uint32_t dev, double snr, int sf, int power, SimTime t, bool adr = true,
                 std::map<std::string, double> gws = {}, double airtime = 0.1)
{
    KpiRecord k{"ns", t, {}};
    const std::string p = "device/" + mac::dev_addr_hex(dev) + "/";
    k.metrics[p + "snr"] = snr;
    k.metrics[p + "sf"] = sf;
    k.metrics[p + "tx_power_dbm"] = power;
    k.metrics[p + "adr"] = adr ? 1 : 0;
    k.metrics[p + "airtime_s"] = airtime;
    for (const auto& [g, s] : gws)
        k.metrics[p + "gw/" + g + "/snr"] = s;
    return k;
}

constexpr std::uint32_t kDev = 0x26011BDA;

}  // namespace

TEST_CASE("E2 golden encodings")
{
    E2Message ctl;
    ctl.kind = E2Kind::ControlReq;
    ctl.transaction_id = 0x102;
    ctl.node_id = "gw1";
    ctl.control = ControlCommand{"gw1", "rx2_sf", 9, 1000};
    CHECK(to_hex(encode_e2(ctl)) == "05000001020100036777312000036777312100067278325f73662200013923000800000000000003e8");
    CHECK(decode_e2(encode_e2(ctl)) == ctl);

    E2Message ind;
    ind.kind = E2Kind::Indication;
    ind.node_id = "ns";
    ind.subscription_id = 3;
    ind.timestamp = 5;
    ind.kpi = KpiRecord{"ns", 5, {{"snr", 1.5}, {"rssi", -101.25}}};
    CHECK(to_hex(encode_e2(ind)) ==
          "04000000000100026e730200040000000305000800000000000000051000026e73110008000000000000000512000c72737369c05950"
          "000000000012000b736e723ff8000000000000");
    CHECK(decode_e2(encode_e2(ind)) == ind);
}

TEST_CASE("E2 codec round trip and error handling")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-200, 200);
    for (int i = 0; i < 3000; ++i) {
        E2Message m;
        m.kind = static_cast<E2Kind>(1 + rng() % 8);
        m.transaction_id = static_cast<std::uint32_t>(rng());
        m.node_id = "node" + std::to_string(rng() % 100);
        if (rng() % 2)
            m.subscription_id = static_cast<std::uint32_t>(rng());
        if (rng() % 2)
            m.xapp_id = "x" + std::to_string(rng() % 7);
        if (rng() % 2)
            m.period = static_cast<SimTime>(rng() % 1'000'000'000'000);
        if (rng() % 2)
            m.timestamp = static_cast<SimTime>(rng() >> 2);
        if (rng() % 2) {
            KpiRecord k{"n", static_cast<SimTime>(rng() % 1000), {}};
            for (int j = 0, n = static_cast<int>(rng() % 12); j < n; ++j)
                k.metrics["m" + std::to_string(rng() % 50)] = u(rng);
            m.kpi = k;
        }
        if (rng() % 2)
            m.control = ControlCommand{"t", "device/00000001/adr", {{"sf", 9}, {"tx_power_dbm", 12}}, 77};
        if (rng() % 3 == 0)
            m.cause = "Validation: bad";
        const auto bytes = encode_e2(m);
        REQUIRE(decode_e2(bytes) == m);
        // Every strict prefix past the fixed header is truncated mid-TLV or loses a field;
        // decoding either throws or yields a different message, never crashes.
        for (std::size_t cut = 0; cut < bytes.size(); cut += 1 + rng() % 5) {
            bool same = false;
            try {
                same = decode_e2(ByteView(bytes).first(cut)) == m;
            } catch (const Error& e) {
                CHECK((e.kind() == ErrorKind::Length || e.kind() == ErrorKind::Format));
            }
            CHECK_FALSE(same);
        }
    }
    CHECK(kind_of([] { decode_e2(Bytes{0x09, 0, 0, 0, 1}); }) == ErrorKind::Format);
    CHECK(kind_of([] { decode_e2(Bytes{0x04, 0, 0, 0, 1, 0x7F, 0, 0}); }) == ErrorKind::Format);
    CHECK(kind_of([] { decode_e2(Bytes{0x04, 0, 0, 0, 1, 0x01, 0, 5, 'a'}); }) == ErrorKind::Length);
    CHECK(kind_of([] { decode_e2(Bytes{0x04, 0, 0, 0, 1, 0x01, 0, 1, 'a', 0x01, 0, 1, 'b'}); }) == ErrorKind::Format);
    CHECK(kind_of([] { decode_e2(Bytes{0x05, 0, 0, 0, 1, 0x21, 0, 1, 'a'}); }) == ErrorKind::Format);
}

TEST_CASE("E2 agent over a DU")
{
    du::DistributedUnit du("gw1");
    E2Agent agent(
        "gw1", [&](SimTime t) { return du.report(t); },
        [&](const std::string& p, const nlohmann::json& v) { du.apply_control(p, v); });

    E2Message sub;
    sub.kind = E2Kind::SubscriptionReq;
    sub.transaction_id = 1;
    sub.period = kNsPerSec;
    const auto r1 = agent.handle(sub, 0);
    sub.transaction_id = 2;
    const auto r2 = agent.handle(sub, 0);
    REQUIRE(r1->kind == E2Kind::SubscriptionResp);
    CHECK(r1->transaction_id == 1);
    CHECK(r2->transaction_id == 2);
    CHECK(r1->subscription_id != r2->subscription_id);

    // Period 1 s over 10 simulated seconds: each subscription gets 10 indications.
    std::map<std::uint32_t, int> per_sub;
    for (SimTime t = 0; t <= 10 * kNsPerSec; t += 250 * kMs)
        for (const auto& m : agent.due_indications(t)) {
            CHECK(m.kind == E2Kind::Indication);
            ++per_sub[*m.subscription_id];
        }
    CHECK(per_sub.size() == 2);
    for (const auto& [id, n] : per_sub)
        CHECK(n == 10);

    E2Message ctl;
    ctl.kind = E2Kind::ControlReq;
    ctl.transaction_id = 40;
    ctl.control = ControlCommand{"gw1", "rx2_sf", 9, 100 * kMs};
    const auto ack = agent.handle(ctl, 50 * kMs);
    CHECK(ack->kind == E2Kind::ControlAck);
    CHECK(ack->transaction_id == 40);
    CHECK(*ack->timestamp == 50 * kMs);
    CHECK(du.rx_windows(0, 868100000, 7).rx2.sf == 9);

    ctl.transaction_id = 41;
    ctl.control->path = "no/such/path";
    const auto fail = agent.handle(ctl, 50 * kMs);
    CHECK(fail->kind == E2Kind::ControlFail);
    CHECK(fail->transaction_id == 41);

    ctl.transaction_id = 42;
    ctl.control = ControlCommand{"gw1", "device/0badbeef/dl_tx_power_dbm", 10, kNsPerSec};
    CHECK(agent.handle(ctl, 0)->kind == E2Kind::ControlFail);

    ctl.transaction_id = 43;
    ctl.control = ControlCommand{"gw1", "rx2_sf", 10, 100 * kMs};
    const auto late = agent.handle(ctl, 101 * kMs);
    CHECK(late->kind == E2Kind::ControlFail);
    CHECK(late->cause->find("timeout") != std::string::npos);
    CHECK(agent.deadline_misses() == 1);
    CHECK(du.rx_windows(0, 868100000, 7).rx2.sf == 9);

    E2Message rep;
    rep.kind = E2Kind::ReportReq;
    rep.transaction_id = 50;
    const auto ind = agent.handle(rep, 7);
    CHECK(ind->kind == E2Kind::Indication);
    CHECK(ind->kpi->metrics.count("uplinks") == 1);
}

TEST_CASE("near-RT host: subscriptions, controls and one response per request")
{
    NearRtRic ric;
    ric.add_xapp(std::make_unique<SfAdjustmentXApp>());
    CHECK(kind_of([&] { ric.add_xapp(std::make_unique<SfAdjustmentXApp>()); }) == ErrorKind::Conflict);
    CHECK(kind_of([&] { ric.subscribe("sf-adjustment", "ns", 0); }) == ErrorKind::NotFound);
    ric.connect_node("ns");
    CHECK(kind_of([&] { ric.subscribe("nope", "ns", 0); }) == ErrorKind::NotFound);

    std::vector<std::string> applied;
    E2Agent ns("ns", [](SimTime t) { return KpiRecord{"ns", t, {}}; },
               [&](const std::string& p, const nlohmann::json& v) {
                   if (p.find("/adr") == std::string::npos)
                       raise(ErrorKind::NotFound, "bad path");
                   applied.push_back(v.dump());
               });
    const auto req = ric.subscribe("sf-adjustment", "ns", 0);
    ric.on_message(decode_e2(encode_e2(*ns.handle(req, 0))), 0);

    std::vector<Outgoing> sent;
    for (int i = 0; i < 5; ++i) {
        const SimTime t = i * 10 * kNsPerSec;
        for (const auto& ind : ns.event_indications(uplink(kDev, 0.0, 12, 14, t)))
            for (auto& o : ric.on_message(decode_e2(encode_e2(ind)), t + 5 * kMs))
                sent.push_back(o);
    }
    REQUIRE(sent.size() == 1);
    CHECK(sent[0].send_at == 40 * kNsPerSec + 6 * kMs);
    CHECK(sent[0].msg.control->deadline == 40 * kNsPerSec + kNsPerSec);
    const auto resp = ns.handle(sent[0].msg, sent[0].send_at + 5 * kMs);
    ric.on_message(*resp, sent[0].send_at + 10 * kMs);
    REQUIRE(applied.size() == 1);
    CHECK(nlohmann::json::parse(applied[0]) == nlohmann::json{{"sf", 9}, {"tx_power_dbm", 14}});
    REQUIRE(ric.control_log().size() == 1);
    CHECK(*ric.control_log()[0].applied_at - ric.control_log()[0].indication_time == 11 * kMs);
    CHECK(ric.audit_latency().empty());
    CHECK(kind_of([&] { ric.on_message(*resp, 0); }) == ErrorKind::Consistency);
}

TEST_CASE("sf adjustment xApp follows the shared ADR rule")
{
    SfAdjustmentXApp app;
    du::AdrTracker oracle;
    std::vector<ControlCommand> cmds;
    for (int i = 0; i < 5; ++i) {
        cmds = app.on_indication(uplink(kDev, 0.0, 12, 14, i), i);
        const auto o = oracle.on_uplink(0.0, 12, 14);
        CHECK(cmds.size() == (o ? 1u : 0u));
    }
    REQUIRE(cmds.size() == 1);
    CHECK(cmds[0].target == "ns");
    CHECK(cmds[0].path == "device/26011bda/adr");
    CHECK(cmds[0].value == nlohmann::json{{"sf", 9}, {"tx_power_dbm", 14}});

    SfAdjustmentXApp flat;
    for (int i = 0; i < 30; ++i)  // margin exactly 0 at sf9: -12.5 + 10
        CHECK(flat.on_indication(uplink(kDev, -2.5, 9, 14, i), i).empty());

    SfAdjustmentXApp off;
    for (int i = 0; i < 30; ++i)
        CHECK(off.on_indication(uplink(kDev, 20.0, 12, 14, i, false), i).empty());
}

TEST_CASE("SF_BOUNDS clamping")
{
    SfAdjustmentXApp app;
    A1Policy p{"floor9", PolicyType::SfBounds, {{"min_sf", 9}, {"max_sf", 12}}, 1};
    app.on_policies({p});
    std::vector<ControlCommand> cmds;
    for (int i = 0; i < 5; ++i)
        cmds = app.on_indication(uplink(kDev, 10.0, 12, 14, i), i);
    REQUIRE(cmds.size() == 1);
    // Unconstrained: margin 20 dB, 6 steps -> sf7 and one power step.
    CHECK(app.unclamped().at(kDev) == du::AdrCommand{7, 12});
    CHECK(cmds[0].value == nlohmann::json{{"sf", 9}, {"tx_power_dbm", 12}});

    // Property: for random histories the clamped command equals clamp(unclamped).
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> snr(-25, 15);
    for (int trial = 0; trial < 300; ++trial) {
        const int lo = 7 + static_cast<int>(rng() % 6);
        const int hi = lo + static_cast<int>(rng() % (13 - lo));
        SfAdjustmentXApp bounded, free;
        bounded.on_policies({{"b", PolicyType::SfBounds, {{"min_sf", lo}, {"max_sf", hi}}, 1}});
        const int sf = 7 + static_cast<int>(rng() % 6);
        const int power = 14 - 2 * static_cast<int>(rng() % 7);
        for (int i = 0; i < 25; ++i) {
            const auto k = uplink(kDev, snr(rng), sf, power, i);
            const auto a = bounded.on_indication(k, i);
            const auto b = free.on_indication(k, i);
            REQUIRE(a.size() == b.size());
            if (!a.empty()) {
                const du::AdrCommand un{b[0].value["sf"].get<int>(), b[0].value["tx_power_dbm"].get<int>()};
                const auto want = clamp(un, {lo, hi});
                CHECK(a[0].value == nlohmann::json{{"sf", want.sf}, {"tx_power_dbm", want.tx_power_dbm}});
            }
        }
    }

    // Device-scoped policies leave other devices alone.
    SfAdjustmentXApp scoped;
    scoped.on_policies({{"d", PolicyType::SfBounds, {{"min_sf", 10}, {"max_sf", 12}, {"devices", {"00000001"}}}, 1}});
    CHECK(scoped.bounds_for(1)->min_sf == 10);
    CHECK_FALSE(scoped.bounds_for(kDev).has_value());
}

TEST_CASE("gateway steering with hysteresis")
{
    SUBCASE("mean gap 5 dB steers")
    {
        GatewaySteeringXApp app;
        std::vector<ControlCommand> cmds;
        for (int i = 0; i < 9; ++i)
            CHECK(app.on_indication(uplink(kDev, 8, 7, 14, i, true, {{"gwA", 3}, {"gwB", 8}}), i).empty());
        // A momentary gwA peak makes it the per-uplink choice; gwB leads on the mean.
        cmds = app.on_indication(uplink(kDev, 9, 7, 14, 9, true, {{"gwA", 9}, {"gwB", 8}}), 9);
        REQUIRE(cmds.size() == 1);
        CHECK(cmds[0].path == "device/26011bda/dl_gateway");
        CHECK(cmds[0].value == "gwB");
        CHECK(*app.rolling_mean(kDev, "gwA") == doctest::Approx(3.6));
        CHECK(app.steered(kDev) == "gwB");
    }
    SUBCASE("2 dB gap does not steer")
    {
        GatewaySteeringXApp app;
        for (int i = 0; i < 9; ++i)
            app.on_indication(uplink(kDev, 5, 7, 14, i, true, {{"gwA", 3}, {"gwB", 5}}), i);
        CHECK(app.on_indication(uplink(kDev, 9, 7, 14, 9, true, {{"gwA", 9}, {"gwB", 5}}), 9).empty());
        CHECK_FALSE(app.steered(kDev).has_value());
    }
    SUBCASE("single gateway never steers")
    {
        GatewaySteeringXApp app;
        for (int i = 0; i < 50; ++i)
            CHECK(app.on_indication(uplink(kDev, i, 7, 14, i, true, {{"gwA", static_cast<double>(i)}}), i).empty());
    }
    SUBCASE("override is sticky until another gateway leads it by the hysteresis")
    {
        GatewaySteeringXApp app;
        for (int i = 0; i < 10; ++i)
            app.on_indication(uplink(kDev, 0, 7, 14, i, true, {{"gwA", 0}, {"gwB", i == 9 ? -10.0 : 6.0}}), i);
        REQUIRE(app.steered(kDev) == "gwB");
        int commands = 0;
        for (int i = 10; i < 40; ++i)
            commands += static_cast<int>(
                app.on_indication(uplink(kDev, 0, 7, 14, i, true, {{"gwA", 8}, {"gwB", 6}}), i).size());
        CHECK(commands == 0);  // gap stays below 3 dB
    }
}

TEST_CASE("energy accounting and forecast")
{
    const auto& c = config::constants();
    CHECK(uplink_energy_j(0.5, 14) == doctest::Approx(uplink_energy_j(1.0, 14) / 2));
    CHECK(uplink_energy_j(1.0, 14) == doctest::Approx(1.0 * 44e-3 * 3.3));
    CHECK(uplink_energy_j(1.0, 2) == doctest::Approx(24e-3 * 3.3));

    EnergyForecastXApp app;
    // 11 uplinks, one per 60 s, 0.5 s airtime each at 14 dBm.
    for (int i = 0; i <= 10; ++i)
        app.on_indication(uplink(kDev, -30, 12, 14, i * 60 * kNsPerSec, true, {}, 0.5), 0);
    const auto e = *app.estimate(kDev);
    const double per = 0.5 * 44e-3 * 3.3;
    CHECK(e.uplinks == 11);
    CHECK(e.energy_j == doctest::Approx(11 * per));
    CHECK(e.rate_j_per_s == doctest::Approx(per / 60));
    CHECK(e.remaining_j == doctest::Approx(c.battery_capacity_j() - 11 * per));
    CHECK(*e.lifetime_days == doctest::Approx(e.remaining_j / e.rate_j_per_s / 86400));
}

TEST_CASE("energy xApp powers down when the forecast is short and the margin allows")
{
    // Heavy drain: 2 s airtime every 10 s at 14 dBm gives a lifetime far below 365 days.
    EnergyForecastXApp app;
    std::vector<ControlCommand> cmds;
    for (int i = 0; i < 10; ++i)
        cmds = app.on_indication(uplink(kDev, 5.0, 7, 14, i * 10 * kNsPerSec, true, {}, 2.0), 0);
    REQUIRE(*app.estimate(kDev)->lifetime_days < 365);
    REQUIRE(cmds.size() == 1);
    CHECK(cmds[0].value == nlohmann::json{{"sf", 7}, {"tx_power_dbm", 12}});
    // Rate limited: nothing for the next 9 uplinks.
    for (int i = 10; i < 19; ++i)
        CHECK(app.on_indication(uplink(kDev, 5.0, 7, 12, i * 10 * kNsPerSec, true, {}, 2.0), 0).empty());

    // No margin: snr at the floor keeps the power.
    EnergyForecastXApp tight;
    for (int i = 0; i < 30; ++i)
        CHECK(tight.on_indication(uplink(kDev, 2.5, 7, 14, i * 10 * kNsPerSec, true, {}, 2.0), 0).empty());

    // Light drain: long forecast, no command even with margin.
    EnergyForecastXApp light;
    for (int i = 0; i < 30; ++i)
        CHECK(light.on_indication(uplink(kDev, 20, 7, 14, i * 3600 * kNsPerSec, true, {}, 0.05), 0).empty());

    // ENERGY_SAVING caps the power regardless of the forecast.
    EnergyForecastXApp capped;
    capped.on_policies({{"e", PolicyType::EnergySaving, {{"max_tx_power_dbm", 9}}, 1}});
    for (int i = 0; i < 10; ++i)
        cmds = capped.on_indication(uplink(kDev, 20, 7, 14, i * 3600 * kNsPerSec, true, {}, 0.05), 0);
    REQUIRE(cmds.size() == 1);
    CHECK(cmds[0].value["tx_power_dbm"] == 8);
}

TEST_CASE("A1 store semantics")
{
    PolicyStore s;
    const nlohmann::json body{{"min_sf", 8}, {"max_sf", 11}};
    const auto p = s.put(PolicyType::SfBounds, "p1", body);
    CHECK(p.version == 1);
    CHECK(s.get(PolicyType::SfBounds, "p1").body == body);
    CHECK(s.put(PolicyType::SfBounds, "p1", body).version == 2);
    CHECK(s.list(PolicyType::SfBounds) == std::vector<std::string>{"p1"});
    CHECK(s.list(PolicyType::EnergySaving).empty());
    try {
        s.put(PolicyType::SfBounds, "p2", {{"min_sf", 5}, {"max_sf", 11}});
        FAIL("expected validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("min_sf") != std::string::npos);
    }
    CHECK(kind_of([&] { s.put(PolicyType::SfBounds, "p3", {{"min_sf", 11}, {"max_sf", 8}}); }) == ErrorKind::Validation);
    CHECK(kind_of([&] { s.put(PolicyType::Prioritization, "p4", {{"devices", {"xyz"}}, {"priority", 1}}); }) ==
          ErrorKind::Validation);
    CHECK(kind_of([&] { s.put(PolicyType::SfBounds, "bad id", body); }) == ErrorKind::Validation);
    s.remove(PolicyType::SfBounds, "p1");
    CHECK(kind_of([&] { s.get(PolicyType::SfBounds, "p1"); }) == ErrorKind::NotFound);
    CHECK(kind_of([&] { s.remove(PolicyType::SfBounds, "p1"); }) == ErrorKind::NotFound);
    CHECK(kind_of([] { policy_type_from("QOS"); }) == ErrorKind::NotFound);

    s.put(PolicyType::Prioritization, "crit", {{"devices", {"26011bda"}}, {"priority", 7}});
    auto copy = PolicyStore::from_json(s.to_json());
    CHECK(copy->snapshot() == s.snapshot());
    CHECK(copy->revision() == s.revision());
}

TEST_CASE("A1 store serializes concurrent writers")
{
    PolicyStore s;
    std::vector<std::thread> ts;
    for (int t = 0; t < 4; ++t)
        ts.emplace_back([&s, t] {
            for (int i = 0; i < 50; ++i) {
                s.put(PolicyType::SfBounds, "w" + std::to_string(t), {{"min_sf", 7}, {"max_sf", 7 + i % 6}});
                const auto got = s.get(PolicyType::SfBounds, "w" + std::to_string(t));
                CHECK(got.version >= static_cast<std::uint64_t>(i + 1));
            }
        });
    for (auto& t : ts)
        t.join();
    CHECK(s.revision() == 200);
    CHECK(s.get(PolicyType::SfBounds, "w2").version == 50);
}

TEST_CASE("A1 REST endpoint")
{
    PolicyStore store;
    A1Server server(store);
    const int port = server.start();
    REQUIRE(port > 0);
    A1Client client("http://127.0.0.1:" + std::to_string(port));
    const nlohmann::json body{{"min_sf", 9}, {"max_sf", 12}};

    auto r = client.put("SF_BOUNDS", "floor", body);
    CHECK(r.status == 201);
    r = client.get("SF_BOUNDS", "floor");
    CHECK(r.status == 200);
    CHECK(nlohmann::json::parse(r.body) == body);
    CHECK(client.put("SF_BOUNDS", "floor", body).status == 200);
    r = client.list("SF_BOUNDS");
    CHECK(nlohmann::json::parse(r.body) == nlohmann::json{"floor"});
    r = client.put("SF_BOUNDS", "broken", {{"min_sf", 9}});
    CHECK(r.status == 400);
    CHECK(r.body.find("max_sf") != std::string::npos);
    CHECK(client.put("QOS", "x", body).status == 404);
    CHECK(client.remove("SF_BOUNDS", "floor").status == 204);
    CHECK(client.get("SF_BOUNDS", "floor").status == 404);
    CHECK(client.remove("SF_BOUNDS", "floor").status == 404);
    CHECK(store.revision() == 3);
    server.stop();
    CHECK(client.get("SF_BOUNDS", "floor").status == 0);
}

TEST_CASE("policies reach xApps within one control period")
{
    PolicyStore store;
    NearRtRic ric(&store);
    auto& app = static_cast<SfAdjustmentXApp&>(ric.add_xapp(std::make_unique<SfAdjustmentXApp>()));
    ric.tick(0);
    const SimTime put_at = 1234 * kMs;
    store.put(PolicyType::SfBounds, "b", {{"min_sf", 10}, {"max_sf", 12}});
    CHECK_FALSE(app.bounds_for(kDev).has_value());
    const SimTime t = ric.next_tick(put_at);
    CHECK(t - put_at <= 100 * kMs);
    CHECK(ric.tick(t));
    CHECK(app.bounds_for(kDev) == SfBounds{10, 12});
    CHECK_FALSE(ric.tick(ric.next_tick(t)));
}

TEST_CASE("energy-efficiency rApp")
{
    CHECK_FALSE(rapp_energy_efficiency({}).has_value());
    CHECK_FALSE(rapp_energy_efficiency({KpiRecord{"ns", 0, {{"merged", 3}}}}).has_value());

    // Nine sf12 uplinks of 1 s for every sf7 uplink of 1 s: 90% of the energy at sf12.
    std::vector<KpiRecord> skewed;
    for (int i = 0; i < 9; ++i)
        skewed.push_back(uplink(0x10 + i, -5, 12, 14, i, true, {}, 1.0));
    skewed.push_back(uplink(0x99, 5, 7, 14, 10, true, {}, 1.0));
    const auto r = *rapp_energy_efficiency(skewed);
    CHECK(r.high_sf_share == doctest::Approx(0.9));
    REQUIRE(r.draft.has_value());
    CHECK(r.draft->type == PolicyType::EnergySaving);
    CHECK(check_policy(r.draft->type, r.draft->body).empty());
    CHECK(r.draft->body["max_sf"] == 10);
    CHECK(r.rationale["recommendation"] == "sf cap review");
    PolicyStore s;
    CHECK_NOTHROW(s.put(r.draft->type, r.draft->policy_id, r.draft->body));

    std::vector<KpiRecord> balanced;
    for (int i = 0; i < 10; ++i)
        balanced.push_back(uplink(0x10 + i, 5, i < 4 ? 12 : 8, 14, i, true, {}, 1.0));
    const auto b = *rapp_energy_efficiency(balanced);
    CHECK(b.high_sf_share == doctest::Approx(0.4));
    CHECK_FALSE(b.draft.has_value());
}

TEST_CASE("kpi archive round trip")
{
    const auto path = std::filesystem::temp_directory_path() / "olrw_test_archive.jsonl";
    std::vector<KpiRecord> recs{uplink(kDev, 1.25, 9, 12, 42), KpiRecord{"du:gw1", 7, {{"uplinks", 3}}}};
    write_kpi_archive(path, recs);
    CHECK(read_kpi_archive(path) == recs);
    std::filesystem::remove(path);
    const auto ups = device_uplinks(recs[0]);
    REQUIRE(ups.size() == 1);
    CHECK(ups[0].dev_addr == kDev);
    CHECK(ups[0].sf == 9);
    CHECK(ups[0].tx_power_dbm == 12);
}
