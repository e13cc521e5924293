/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "olrw/common/error.hpp"
#include "olrw/smo/smo.hpp"

namespace olrw::cli {

int cmd_o1_validate(const std::string& doc_file, std::ostream& out, std::ostream& err)
{
    std::ifstream in(doc_file);
    if (!in) {
        err << "olrw o1: cannot read " << doc_file << "\n";
        return kUsage;
    }
    try {
        const auto doc = smo::config_document_from(nlohmann::json::parse(in));
        out << doc.target << " " << doc.document_id << ": valid (" << doc.parameters.size() << " parameters)\n";
        return kOk;
    } catch (const nlohmann::json::exception& e) {
        err << "olrw o1: " << doc_file << ": " << e.what() << "\n";
    } catch (const Error& e) {
        err << "olrw o1: " << doc_file << ": " << e.what() << "\n";
    }
    return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"O-LoRaWAN simulator and operator tool", "olrw"};
    app.require_subcommand(1);

    SimArgs sim;
    auto* s = app.add_subcommand("sim", "Run a scenario and write its report");
    s->add_option("--scenario", sim.scenario, "Scenario file")->required();
    s->add_option("--mode", sim.mode, "Override the gateway mode")->check(CLI::IsMember({"legacy", "modular"}));
    s->add_option("--seed", sim.seed, "Override the scenario seed");
    s->add_option("--out", sim.out_dir, "Output directory")->required();
    s->add_flag("--capture", sim.capture, "Write the fronthaul capture");
    s->add_flag("--trace", sim.trace, "Write the event trace");

    auto* codec = app.add_subcommand("codec", "Fronthaul section codec");
    codec->require_subcommand(1);
    std::string dec_file, enc_file, enc_out;
    bool dec_json = false;
    auto* dec = codec->add_subcommand("decode", "Pretty-print a frame or capture file");
    dec->add_option("file", dec_file, "Frame, hex text or OLRW1 capture")->required();
    dec->add_flag("--json", dec_json, "Print sections as JSON");
    auto* enc = codec->add_subcommand("encode", "Encode JSON sections");
    enc->add_option("file", enc_file, "Section object or array of sections")->required();
    enc->add_option("--out", enc_out, "Output file (hex on stdout when absent)");

    PolicyArgs pol;
    auto* p = app.add_subcommand("policy", "A1 policy management");
    p->add_option("action", pol.action, "put | get | delete | list")
        ->required()
        ->check(CLI::IsMember({"put", "get", "delete", "list"}));
    p->add_option("type", pol.type, "Policy type")->required();
    p->add_option("id", pol.id, "Policy id");
    p->add_option("--body", pol.body, "Policy body: JSON text or @file");
    p->add_option("--url", pol.url, "A1 endpoint (default $OLRW_A1_URL)");
    p->add_option("--store", pol.store, "Offline policy store file");

    std::string report_file, report_out;
    auto* r = app.add_subcommand("report", "Summaries and plots from a sim report");
    r->add_option("report", report_file, "report.json")->required();
    r->add_option("--out", report_out, "Directory for CSV and SVG plots");

    std::string o1_doc;
    auto* o1 = app.add_subcommand("o1", "O1 configuration documents");
    o1->require_subcommand(1);
    auto* val = o1->add_subcommand("validate", "Validate a config document");
    val->add_option("document", o1_doc)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    if (s->parsed())
        return cmd_sim(sim, out, err);
    if (dec->parsed())
        return cmd_codec_decode(dec_file, dec_json, out, err);
    if (enc->parsed())
        return cmd_codec_encode(enc_file, enc_out, out, err);
    if (p->parsed()) {
        if (pol.url.empty() && pol.store.empty())
            if (const char* env = std::getenv("OLRW_A1_URL"))
                pol.url = env;
        return cmd_policy(pol, out, err);
    }
    if (r->parsed())
        return cmd_report(report_file, report_out, out, err);
    if (val->parsed())
        return cmd_o1_validate(o1_doc, out, err);
    return kUsage;
}

}  // namespace olrw::cli
