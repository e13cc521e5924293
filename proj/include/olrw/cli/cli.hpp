/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace olrw::cli {

/// Exit codes: 0 success, 1 runtime or audit failure, 2 usage or validation error.
enum Exit : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Runs one `olrw` invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommand bodies, called after flag parsing.
struct SimArgs {
    std::string scenario;
    std::string mode;  ///< empty keeps the scenario's mode
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool capture = false;
    bool trace = false;
};
int cmd_sim(const SimArgs& a, std::ostream& out, std::ostream& err);

int cmd_codec_decode(const std::string& file, bool as_json, std::ostream& out, std::ostream& err);
int cmd_codec_encode(const std::string& json_file, const std::string& out_file, std::ostream& out, std::ostream& err);

struct PolicyArgs {
    std::string action;  ///< put | get | delete | list
    std::string type;
    std::string id;
    std::string body;  ///< JSON text or @file
    std::string url;
    std::string store;
};
int cmd_policy(const PolicyArgs& a, std::ostream& out, std::ostream& err);

int cmd_report(const std::string& report_file, const std::string& out_dir, std::ostream& out, std::ostream& err);

int cmd_o1_validate(const std::string& doc_file, std::ostream& out, std::ostream& err);

}  // namespace olrw::cli
