/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "olrw/cli/cli.hpp"
#include "olrw/ric/a1.hpp"

namespace fs = std::filesystem;
using olrw::cli::run;

namespace {

const fs::path kSource(OLRW_SOURCE_DIR);

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result olrw_cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("olrw_cli_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("sim writes a reproducible report")
{
    const auto a = scratch("sim_a"), b = scratch("sim_b");
    const auto sc = (kSource / "scenarios" / "baseline.json").string();
    auto r = olrw_cli({"sim", "--scenario", sc, "--out", a.string(), "--capture"});
    CHECK(r.code == 0);
    CHECK(fs::exists(a / "report.json"));
    CHECK(fs::exists(a / "capture.olrw"));
    CHECK(!fs::exists(a / "trace.txt"));
    r = olrw_cli({"sim", "--scenario", sc, "--out", b.string(), "--capture", "--mode", "modular", "--seed", "1"});
    CHECK(r.code == 0);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "capture.olrw") == slurp(b / "capture.olrw"));

    CHECK(olrw_cli({"sim", "--scenario", "/nonexistent.json", "--out", a.string()}).code == 2);
    CHECK(olrw_cli({"sim", "--scenario", sc, "--out", a.string(), "--mode", "hybrid"}).code == 2);
    CHECK(olrw_cli({"sim", "--scenario", sc}).code == 2);
    CHECK(olrw_cli({}).code == 2);
    CHECK(olrw_cli({"--help"}).code == 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("codec decode and encode")
{
    const auto fixtures = kSource / "tests" / "fixtures";
    auto r = olrw_cli({"codec", "decode", (fixtures / "golden_ul_section.hex").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out == "frame 0 @0\n" + slurp(fixtures / "golden_ul_section.txt"));

    // decode --json then encode restores the octets.
    const auto dir = scratch("codec");
    fs::create_directories(dir);
    r = olrw_cli({"codec", "decode", "--json", (fixtures / "golden_ul_section.hex").string()});
    REQUIRE(r.code == 0);
    std::ofstream(dir / "s.json") << r.out;
    r = olrw_cli({"codec", "encode", (dir / "s.json").string(), "--out", (dir / "two.olrw").string()});
    CHECK(r.code == 0);  // a one-element array still holds one frame
    r = olrw_cli({"codec", "decode", (dir / "two.olrw").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("Timestamp Reception: 1700000000123456789 ns") != std::string::npos);

    // Two frames become a capture; truncating it names the failing offset.
    r = olrw_cli({"codec", "decode", "--json", (fixtures / "golden_ul_section.hex").string()});
    auto j = nlohmann::json::parse(r.out);
    j.push_back(j[0]);
    std::ofstream(dir / "pair.json") << j.dump();
    REQUIRE(olrw_cli({"codec", "encode", (dir / "pair.json").string(), "--out", (dir / "pair.olrw").string()}).code ==
            0);
    const auto cap = slurp(dir / "pair.olrw");
    CHECK(cap.rfind("OLRW1", 0) == 0);
    r = olrw_cli({"codec", "decode", (dir / "pair.olrw").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("frame 1 @") != std::string::npos);
    std::ofstream(dir / "cut.olrw", std::ios::binary) << cap.substr(0, cap.size() - 3);
    r = olrw_cli({"codec", "decode", (dir / "cut.olrw").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("offset") != std::string::npos);

    // A damaged frame reports the frame and its file offset.
    auto bad = cap;
    bad[5 + 4] = static_cast<char>(0x3F);  // eCPRI revision 3 in the first frame
    std::ofstream(dir / "bad.olrw", std::ios::binary) << bad;
    r = olrw_cli({"codec", "decode", (dir / "bad.olrw").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("frame 0 at file offset 9") != std::string::npos);

    std::ofstream(dir / "junk.json") << R"({"direction": "UL", "bogus": 1})";
    CHECK(olrw_cli({"codec", "encode", (dir / "junk.json").string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("policy against an offline store")
{
    const auto dir = scratch("policy");
    fs::create_directories(dir);
    const auto store = (dir / "store.json").string();
    auto r = olrw_cli({"policy", "put", "SF_BOUNDS", "floor", "--store", store, "--body", R"({"min_sf":8,"max_sf":12})"});
    CHECK(r.code == 0);
    r = olrw_cli({"policy", "get", "SF_BOUNDS", "floor", "--store", store});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["body"]["min_sf"] == 8);
    r = olrw_cli({"policy", "list", "SF_BOUNDS", "--store", store});
    CHECK(nlohmann::json::parse(r.out) == nlohmann::json::array({"floor"}));
    CHECK(olrw_cli({"policy", "delete", "SF_BOUNDS", "floor", "--store", store}).code == 0);
    r = olrw_cli({"policy", "get", "SF_BOUNDS", "floor", "--store", store});
    CHECK(r.code == 1);
    CHECK(r.err.find("404") != std::string::npos);
    r = olrw_cli({"policy", "put", "SF_BOUNDS", "x", "--store", store, "--body", R"({"min_sf":12,"max_sf":7})"});
    CHECK(r.code == 2);
    CHECK(r.err.find("400") != std::string::npos);
    CHECK(olrw_cli({"policy", "put", "NOPE", "x", "--store", store}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("policy over HTTP")
{
    olrw::ric::PolicyStore store;
    olrw::ric::A1Server server(store);
    const int port = server.start();
    const auto url = "http://127.0.0.1:" + std::to_string(port);
    auto r = olrw_cli({"policy", "put", "ENERGY_SAVING", "e1", "--url", url, "--body", R"({"max_tx_power_dbm":10})"});
    CHECK(r.code == 0);
    CHECK(store.get(olrw::ric::PolicyType::EnergySaving, "e1").body["max_tx_power_dbm"] == 10);
    r = olrw_cli({"policy", "get", "ENERGY_SAVING", "e1", "--url", url});
    CHECK(r.code == 0);
    CHECK(olrw_cli({"policy", "delete", "ENERGY_SAVING", "e1", "--url", url}).code == 0);
    r = olrw_cli({"policy", "get", "ENERGY_SAVING", "e1", "--url", url});
    CHECK(r.code == 1);
    CHECK(r.err.find("HTTP 404") != std::string::npos);
    r = olrw_cli({"policy", "put", "ENERGY_SAVING", "e2", "--url", url, "--body", R"({"max_tx_power_dbm":99})"});
    CHECK(r.code == 2);
    CHECK(r.err.find("max_tx_power_dbm") != std::string::npos);
    server.stop();
    CHECK(olrw_cli({"policy", "list", "ENERGY_SAVING", "--url", url}).code == 1);
}

TEST_CASE("report tables and plots")
{
    const auto dir = scratch("report");
    REQUIRE(olrw_cli({"sim", "--scenario", (kSource / "scenarios" / "baseline.json").string(), "--out", dir.string()})
                .code == 0);
    const auto r = olrw_cli({"report", (dir / "report.json").string(), "--out", (dir / "plots").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("26011001  100  100        1.0000") != std::string::npos);
    for (const auto* f : {"pdr_by_device.csv", "pdr_vs_sf.csv", "ric_timeline.csv", "pdr_vs_sf.svg",
                          "energy_per_device.svg", "ric_timeline.svg"})
        CHECK(fs::exists(dir / "plots" / f));
    CHECK(slurp(dir / "plots" / "pdr_vs_sf.csv") == "sf,tx,delivered,pdr\n7,100,100,1.0000\n");

    std::ofstream(dir / "empty.json") << "{}";
    const auto e = olrw_cli({"report", (dir / "empty.json").string()});
    CHECK(e.code == 0);
    CHECK(e.out.find("Devices") != std::string::npos);
    CHECK(olrw_cli({"report", (dir / "missing.json").string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("o1 validate")
{
    const auto dir = scratch("o1");
    fs::create_directories(dir);
    std::ofstream(dir / "ok.json")
        << R"({"target":"du:gw-1","schema_version":1,"document_id":"d1","parameters":{"duty_cycle_limit":0.001}})";
    std::ofstream(dir / "bad.json")
        << R"({"target":"du:gw-1","schema_version":1,"document_id":"d1","parameters":{"duty_cycle_limit":3}})";
    CHECK(olrw_cli({"o1", "validate", (dir / "ok.json").string()}).code == 0);
    const auto r = olrw_cli({"o1", "validate", (dir / "bad.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("/parameters/duty_cycle_limit") != std::string::npos);
    fs::remove_all(dir);
}
