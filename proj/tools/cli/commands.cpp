/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <ostream>

#include "olrw/cli/cli.hpp"
#include "olrw/common/bytes.hpp"
#include "olrw/common/error.hpp"
#include "olrw/fronthaul/codec.hpp"
#include "olrw/fronthaul/json.hpp"
#include "olrw/netsim/sim.hpp"
#include "olrw/ric/a1.hpp"

namespace olrw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, std::string_view text)
{
    std::ofstream f(path, std::ios::binary);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f)
        raise(ErrorKind::Io, "cannot write " + path.string());
}

void write_file(const fs::path& path, const Bytes& bytes)
{
    write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::optional<Bytes> read_file(const fs::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        return std::nullopt;
    return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

bool looks_like_hex(const Bytes& b)
{
    std::size_t digits = 0;
    for (auto c : b) {
        if (std::isxdigit(c))
            ++digits;
        else if (!std::isspace(c))
            return false;
    }
    return digits > 0 && digits % 2 == 0;
}

}  // namespace

// sim

int cmd_sim(const SimArgs& a, std::ostream& out, std::ostream& err)
{
    netsim::Scenario sc;
    netsim::RunOptions opt;
    try {
        sc = netsim::load_scenario(a.scenario);
        if (!a.mode.empty())
            opt.mode = netsim::mode_from(a.mode);
    } catch (const Error& e) {
        err << "olrw sim: " << e.what() << "\n";
        return kUsage;
    }
    opt.seed = a.seed;
    opt.keep_trace = true;

    try {
        const auto r = netsim::run_scenario(sc, opt);
        const fs::path dir(a.out_dir);
        fs::create_directories(dir);
        write_file(dir / "report.json", netsim::report_text(r.report));
        if (a.capture)
            write_file(dir / "capture.olrw", netsim::capture_file(r.capture));
        std::string trace;
        if (a.trace || !r.ok()) {
            for (const auto& line : r.trace)
                trace += line + "\n";
            write_file(dir / "trace.txt", trace);
        }
        const auto& up = r.report["uplinks"];
        out << r.report["scenario"].get<std::string>() << " (" << r.report["mode"].get<std::string>() << ", seed "
            << r.report["seed"] << "): " << up["delivered"] << "/" << up["transmitted"] << " uplinks delivered, pdr "
            << r.report["pdr"].get<double>() << "\n";
        out << "report: " << (dir / "report.json").string() << "\n";
        if (!r.ok()) {
            for (const auto& f : r.audit_failures)
                err << "audit: " << f << "\n";
            err << "trace: " << (dir / "trace.txt").string() << "\n";
            return kFailure;
        }
        return kOk;
    } catch (const Error& e) {
        err << "olrw sim: " << e.what() << "\n";
        return kFailure;
    } catch (const fs::filesystem_error& e) {
        err << "olrw sim: " << e.what() << "\n";
        return kFailure;
    }
}

// codec

int cmd_codec_decode(const std::string& file, bool as_json, std::ostream& out, std::ostream& err)
{
    auto data = read_file(file);
    if (!data) {
        err << "olrw codec: cannot read " << file << "\n";
        return kUsage;
    }
    if (looks_like_hex(*data)) {
        std::string text;
        for (auto c : *data)
            if (!std::isspace(c))
                text.push_back(static_cast<char>(c));
        data = from_hex(text);
    }

    // Frames with their file offsets; a bare frame starts at 0.
    std::vector<std::pair<std::size_t, Bytes>> frames;
    const std::string_view magic = "OLRW1";
    if (data->size() >= magic.size() && std::equal(magic.begin(), magic.end(), data->begin())) {
        try {
            std::size_t at = magic.size();
            for (auto& f : fronthaul::decode_capture(*data)) {
                const auto n = f.size();
                frames.emplace_back(at + 4, std::move(f));
                at += 4 + n;
            }
        } catch (const Error& e) {
            err << "olrw codec: " << file << ": " << e.what() << "\n";
            return kUsage;
        }
    } else {
        frames.emplace_back(0, *data);
    }

    json all = json::array();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& [at, f] = frames[i];
        try {
            // eCPRI revision 1 in the top nibble marks a framed section; anything else
            // is read as a bare section.
            const bool framed = !f.empty() && (f[0] >> 4) == 1;
            const auto sec = framed ? fronthaul::decode_frame(f) : fronthaul::decode_section(f);
            if (as_json) {
                all.push_back(fronthaul::section_to_json(sec));
            } else {
                out << "frame " << i << " @" << at << "\n";
                if (framed)
                    out << fronthaul::format_ecpri_header(fronthaul::decode_ecpri(f).header) << "\n";
                out << fronthaul::format_section(sec);
            }
        } catch (const Error& e) {
            err << "olrw codec: " << file << ": frame " << i << " at file offset " << at << ": " << e.what() << "\n";
            return kUsage;
        }
    }
    if (as_json)
        out << all.dump(2) << "\n";
    return kOk;
}

int cmd_codec_encode(const std::string& json_file, const std::string& out_file, std::ostream& out, std::ostream& err)
{
    std::ifstream in(json_file);
    if (!in) {
        err << "olrw codec: cannot read " << json_file << "\n";
        return kUsage;
    }
    std::vector<Bytes> frames;
    try {
        const auto j = json::parse(in);
        if (j.is_array())
            for (const auto& s : j)
                frames.push_back(fronthaul::encode_frame(fronthaul::section_from_json(s)));
        else
            frames.push_back(fronthaul::encode_frame(fronthaul::section_from_json(j)));
    } catch (const json::exception& e) {
        err << "olrw codec: " << json_file << ": " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "olrw codec: " << json_file << ": " << e.what() << "\n";
        return kUsage;
    }
    // One frame is written bare; several become a capture file.
    const Bytes bytes = frames.size() == 1 ? frames[0] : fronthaul::encode_capture(frames);
    if (out_file.empty()) {
        out << to_hex(bytes) << "\n";
        return kOk;
    }
    try {
        write_file(out_file, bytes);
    } catch (const Error& e) {
        err << "olrw codec: " << e.what() << "\n";
        return kFailure;
    }
    out << out_file << ": " << frames.size() << " frame(s), " << bytes.size() << " octets\n";
    return kOk;
}

// policy

namespace {

int policy_status(int status, const std::string& body, std::ostream& out, std::ostream& err)
{
    if (status == 0) {
        err << "olrw policy: endpoint unreachable\n";
        return kFailure;
    }
    if (status >= 200 && status < 300) {
        if (!body.empty())
            out << body << (body.back() == '\n' ? "" : "\n");
        return kOk;
    }
    err << "olrw policy: HTTP " << status << (body.empty() ? "" : ": " + body) << "\n";
    return status == 400 ? kUsage : kFailure;
}

}  // namespace

int cmd_policy(const PolicyArgs& a, std::ostream& out, std::ostream& err)
{
    if (a.url.empty() && a.store.empty()) {
        err << "olrw policy: give --url, --store or set OLRW_A1_URL\n";
        return kUsage;
    }
    if (a.action != "list" && a.id.empty()) {
        err << "olrw policy: " << a.action << " needs a policy id\n";
        return kUsage;
    }
    json body;
    if (a.action == "put") {
        try {
            if (!a.body.empty() && a.body[0] == '@') {
                std::ifstream in(a.body.substr(1));
                if (!in) {
                    err << "olrw policy: cannot read " << a.body.substr(1) << "\n";
                    return kUsage;
                }
                body = json::parse(in);
            } else {
                body = json::parse(a.body.empty() ? "{}" : a.body);
            }
        } catch (const json::exception& e) {
            err << "olrw policy: body: " << e.what() << "\n";
            return kUsage;
        }
    }
    ric::PolicyType type;
    try {
        type = ric::policy_type_from(a.type);
    } catch (const Error& e) {
        err << "olrw policy: " << e.what() << "\n";
        return kUsage;
    }

    if (!a.url.empty()) {
        ric::A1Client c(a.url);
        ric::A1Response r;
        if (a.action == "put")
            r = c.put(a.type, a.id, body);
        else if (a.action == "get")
            r = c.get(a.type, a.id);
        else if (a.action == "delete")
            r = c.remove(a.type, a.id);
        else
            r = c.list(a.type);
        return policy_status(r.status, r.body, out, err);
    }

    // Offline store: the same outcomes mapped onto HTTP statuses.
    try {
        auto store = ric::PolicyStore::load(a.store);
        if (a.action == "put") {
            const auto p = store->put(type, a.id, body);
            store->save(a.store);
            return policy_status(p.version == 1 ? 201 : 200, ric::to_json(p).dump(), out, err);
        }
        if (a.action == "get")
            return policy_status(200, ric::to_json(store->get(type, a.id)).dump(), out, err);
        if (a.action == "delete") {
            store->remove(type, a.id);
            store->save(a.store);
            return policy_status(204, "", out, err);
        }
        return policy_status(200, json(store->list(type)).dump(), out, err);
    } catch (const Error& e) {
        const int status = e.kind() == ErrorKind::NotFound ? 404 : e.kind() == ErrorKind::Validation ? 400 : 500;
        return policy_status(status, e.what(), out, err);
    }
}

}  // namespace olrw::cli
