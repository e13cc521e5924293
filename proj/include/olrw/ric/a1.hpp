/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "olrw/config/schema.hpp"

namespace olrw::ric {

enum class PolicyType { Prioritization, EnergySaving, SfBounds };

/// "PRIORITIZATION", "ENERGY_SAVING", "SF_BOUNDS".
const char* to_string(PolicyType t);
/// Unknown names throw NotFound.
PolicyType policy_type_from(std::string_view name);
const std::vector<PolicyType>& all_policy_types();

struct A1Policy {
    std::string policy_id;
    PolicyType type = PolicyType::Prioritization;
    nlohmann::json body;
    std::uint64_t version = 0;  ///< per policy, 1 on creation

    bool operator==(const A1Policy&) const = default;
};

nlohmann::json to_json(const A1Policy& p);

/// Schema violations of a policy body (empty when valid). SF_BOUNDS also checks
/// min_sf <= max_sf.
std::vector<config::Violation> check_policy(PolicyType type, const nlohmann::json& body);

/// Versioned A1 policy store. Writes are serialized; every read sees the state after
/// some acknowledged write.
class PolicyStore {
public:
    PolicyStore() = default;

    /// Creates or replaces a policy. Throws Validation naming the offending field.
    A1Policy put(PolicyType type, const std::string& policy_id, const nlohmann::json& body);
    /// Throws NotFound.
    A1Policy get(PolicyType type, const std::string& policy_id) const;
    void remove(PolicyType type, const std::string& policy_id);
    std::vector<std::string> list(PolicyType type) const;
    /// Every policy, ordered by (type, id).
    std::vector<A1Policy> snapshot() const;
    /// Incremented by every successful put or delete.
    std::uint64_t revision() const;

    nlohmann::json to_json() const;
    static std::unique_ptr<PolicyStore> from_json(const nlohmann::json& j);
    /// File-backed offline store; a missing file loads as empty.
    static std::unique_ptr<PolicyStore> load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

private:
    mutable std::mutex mu_;
    std::map<std::pair<PolicyType, std::string>, A1Policy> policies_;
    std::uint64_t revision_ = 0;
};

/// HTTP/1.1 A1-P endpoint:
///   GET    /a1-p/policytypes
///   GET    /a1-p/policytypes/{type}/policies
///   PUT    /a1-p/policytypes/{type}/policies/{id}   (201 created, 200 replaced, 400 invalid)
///   GET    /a1-p/policytypes/{type}/policies/{id}   (200, 404)
///   DELETE /a1-p/policytypes/{type}/policies/{id}   (204, 404)
class A1Server {
public:
    explicit A1Server(PolicyStore& store);
    ~A1Server();
    A1Server(const A1Server&) = delete;
    A1Server& operator=(const A1Server&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port; returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct A1Response {
    int status = 0;  ///< HTTP status, 0 when the endpoint was unreachable
    std::string body;
};

/// Minimal A1-P client for base URLs such as http://127.0.0.1:8080.
class A1Client {
public:
    explicit A1Client(std::string base_url);
    A1Response put(const std::string& type, const std::string& id, const nlohmann::json& body) const;
    A1Response get(const std::string& type, const std::string& id) const;
    A1Response remove(const std::string& type, const std::string& id) const;
    A1Response list(const std::string& type) const;

private:
    std::string base_;
};

}  // namespace olrw::ric
