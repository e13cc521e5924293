/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/ric/a1.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "olrw/common/error.hpp"

namespace olrw::ric {

const char* to_string(PolicyType t)
{
    switch (t) {
    case PolicyType::Prioritization: return "PRIORITIZATION";
    case PolicyType::EnergySaving: return "ENERGY_SAVING";
    case PolicyType::SfBounds: return "SF_BOUNDS";
    }
    return "?";
}

PolicyType policy_type_from(std::string_view name)
{
    for (auto t : all_policy_types())
        if (name == to_string(t))
            return t;
    raise(ErrorKind::NotFound, "unknown policy type '" + std::string(name) + "'");
}

const std::vector<PolicyType>& all_policy_types()
{
    static const std::vector<PolicyType> v{PolicyType::Prioritization, PolicyType::EnergySaving, PolicyType::SfBounds};
    return v;
}

nlohmann::json to_json(const A1Policy& p)
{
    return {{"policy_id", p.policy_id}, {"policy_type", to_string(p.type)}, {"version", p.version}, {"body", p.body}};
}

std::vector<config::Violation> check_policy(PolicyType type, const nlohmann::json& body)
{
    auto v = config::validate_schema(body, std::string("a1.") + to_string(type));
    if (v.empty() && type == PolicyType::SfBounds && body["min_sf"].get<int>() > body["max_sf"].get<int>())
        v.push_back({"/min_sf", "greater than max_sf"});
    return v;
}

namespace {

void check_id(const std::string& id)
{
    static const std::regex re("^[A-Za-z0-9_.-]{1,64}$");
    if (!std::regex_match(id, re))
        raise(ErrorKind::Validation, "policy id '" + id + "' must match [A-Za-z0-9_.-]{1,64}");
}

}  // namespace

A1Policy PolicyStore::put(PolicyType type, const std::string& policy_id, const nlohmann::json& body)
{
    check_id(policy_id);
    const auto v = check_policy(type, body);
    if (!v.empty())
        raise(ErrorKind::Validation, std::string(to_string(type)) + " policy: " + config::format_violations(v));
    std::lock_guard lock(mu_);
    auto& p = policies_[{type, policy_id}];
    p.policy_id = policy_id;
    p.type = type;
    p.body = body;
    ++p.version;
    ++revision_;
    return p;
}

A1Policy PolicyStore::get(PolicyType type, const std::string& policy_id) const
{
    std::lock_guard lock(mu_);
    auto it = policies_.find({type, policy_id});
    if (it == policies_.end())
        raise(ErrorKind::NotFound, std::string(to_string(type)) + " policy '" + policy_id + "' not found");
    return it->second;
}

void PolicyStore::remove(PolicyType type, const std::string& policy_id)
{
    std::lock_guard lock(mu_);
    if (policies_.erase({type, policy_id}) == 0)
        raise(ErrorKind::NotFound, std::string(to_string(type)) + " policy '" + policy_id + "' not found");
    ++revision_;
}

std::vector<std::string> PolicyStore::list(PolicyType type) const
{
    std::lock_guard lock(mu_);
    std::vector<std::string> ids;
    for (const auto& [k, p] : policies_)
        if (k.first == type)
            ids.push_back(k.second);
    return ids;
}

std::vector<A1Policy> PolicyStore::snapshot() const
{
    std::lock_guard lock(mu_);
    std::vector<A1Policy> out;
    for (const auto& [k, p] : policies_)
        out.push_back(p);
    return out;
}

std::uint64_t PolicyStore::revision() const
{
    std::lock_guard lock(mu_);
    return revision_;
}

nlohmann::json PolicyStore::to_json() const
{
    std::lock_guard lock(mu_);
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [k, p] : policies_)
        list.push_back(ric::to_json(p));
    return {{"revision", revision_}, {"policies", std::move(list)}};
}

std::unique_ptr<PolicyStore> PolicyStore::from_json(const nlohmann::json& j)
{
    auto s = std::make_unique<PolicyStore>();
    try {
        for (const auto& p : j.at("policies")) {
            const auto type = policy_type_from(p.at("policy_type").get<std::string>());
            s->put(type, p.at("policy_id").get<std::string>(), p.at("body"));
            s->policies_[{type, p.at("policy_id").get<std::string>()}].version = p.at("version").get<std::uint64_t>();
        }
        s->revision_ = j.at("revision").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Parse, std::string("policy store document: ") + e.what());
    }
    return s;
}

std::unique_ptr<PolicyStore> PolicyStore::load(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        return std::make_unique<PolicyStore>();
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::Io, "cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    return from_json(j);
}

void PolicyStore::save(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out)
        raise(ErrorKind::Io, "cannot write " + path.string());
    out << to_json().dump(2) << '\n';
}

// REST endpoint

struct A1Server::Impl {
    PolicyStore& store;
    httplib::Server server;
    std::thread thread;

    explicit Impl(PolicyStore& s) : store(s) {}
};

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& j)
{
    res.status = status;
    res.set_content(j.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg)
{
    send_json(res, status, {{"error", msg}});
}

}  // namespace

A1Server::A1Server(PolicyStore& store) : impl_(std::make_unique<Impl>(store)) {}

A1Server::~A1Server() { stop(); }

int A1Server::start(const std::string& host, int port)
{
    auto& srv = impl_->server;
    auto& store = impl_->store;
    const std::string base = "/a1-p/policytypes";

    srv.Get(base, [](const httplib::Request&, httplib::Response& res) {
        nlohmann::json j = nlohmann::json::array();
        for (auto t : all_policy_types())
            j.push_back(to_string(t));
        send_json(res, 200, j);
    });
    srv.Get(base + R"(/([A-Z_]+)/policies)", [&store](const httplib::Request& req, httplib::Response& res) {
        try {
            send_json(res, 200, store.list(policy_type_from(req.matches[1].str())));
        } catch (const Error& e) {
            send_error(res, 404, e.what());
        }
    });
    const std::string item = base + R"(/([A-Z_]+)/policies/([^/]+))";
    srv.Put(item, [&store](const httplib::Request& req, httplib::Response& res) {
        PolicyType type;
        try {
            type = policy_type_from(req.matches[1].str());
        } catch (const Error& e) {
            send_error(res, 404, e.what());
            return;
        }
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
            send_error(res, 400, std::string("body is not valid JSON: ") + e.what());
            return;
        }
        const auto v = check_policy(type, body);
        if (!v.empty()) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& x : v)
                list.push_back({{"path", x.path}, {"message", x.message}});
            send_json(res, 400, {{"error", config::format_violations(v)}, {"violations", list}});
            return;
        }
        try {
            const auto p = store.put(type, req.matches[2].str(), body);
            send_json(res, p.version == 1 ? 201 : 200, to_json(p));
        } catch (const Error& e) {
            send_error(res, 400, e.what());
        }
    });
    srv.Get(item, [&store](const httplib::Request& req, httplib::Response& res) {
        try {
            const auto p = store.get(policy_type_from(req.matches[1].str()), req.matches[2].str());
            send_json(res, 200, p.body);
            res.set_header("X-Policy-Version", std::to_string(p.version));
        } catch (const Error& e) {
            send_error(res, 404, e.what());
        }
    });
    srv.Delete(item, [&store](const httplib::Request& req, httplib::Response& res) {
        try {
            store.remove(policy_type_from(req.matches[1].str()), req.matches[2].str());
            res.status = 204;
        } catch (const Error& e) {
            send_error(res, 404, e.what());
        }
    });

    int bound = port;
    if (port == 0)
        bound = srv.bind_to_any_port(host);
    else if (!srv.bind_to_port(host, port))
        bound = -1;
    if (bound < 0)
        raise(ErrorKind::Io, "cannot bind A1 endpoint on " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
    srv.wait_until_ready();
    return bound;
}

void A1Server::stop()
{
    if (!impl_)
        return;
    impl_->server.stop();
    if (impl_->thread.joinable())
        impl_->thread.join();
}

A1Client::A1Client(std::string base_url) : base_(std::move(base_url))
{
    while (!base_.empty() && base_.back() == '/')
        base_.pop_back();
}

namespace {

A1Response wrap(const httplib::Result& r)
{
    if (!r)
        return {0, "A1 endpoint unreachable: " + httplib::to_string(r.error())};
    return {r->status, r->body};
}

std::string item_path(const std::string& type, const std::string& id)
{
    return "/a1-p/policytypes/" + type + "/policies/" + id;
}

}  // namespace

A1Response A1Client::put(const std::string& type, const std::string& id, const nlohmann::json& body) const
{
    httplib::Client c(base_);
    return wrap(c.Put(item_path(type, id), body.dump(), "application/json"));
}

A1Response A1Client::get(const std::string& type, const std::string& id) const
{
    httplib::Client c(base_);
    return wrap(c.Get(item_path(type, id)));
}

A1Response A1Client::remove(const std::string& type, const std::string& id) const
{
    httplib::Client c(base_);
    return wrap(c.Delete(item_path(type, id)));
}

A1Response A1Client::list(const std::string& type) const
{
    httplib::Client c(base_);
    return wrap(c.Get("/a1-p/policytypes/" + type + "/policies"));
}

}  // namespace olrw::ric
