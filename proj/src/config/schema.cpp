/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/config/schema.hpp"

#include <regex>

#include "olrw/common/error.hpp"
#include "olrw/config/constants.hpp"

namespace olrw::config {

using nlohmann::json;

namespace {

bool type_matches(const json& v, const std::string& type)
{
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    return false;
}

void check(const json& v, const json& s, const std::string& path, std::vector<Violation>& out)
{
    auto add = [&](std::string msg) { out.push_back({path.empty() ? "/" : path, std::move(msg)}); };

    if (s.contains("type")) {
        auto type = s["type"].get<std::string>();
        if (!type_matches(v, type)) {
            add("expected " + type);
            return;
        }
    }
    if (s.contains("enum")) {
        bool found = false;
        for (const auto& e : s["enum"])
            found = found || e == v;
        if (!found)
            add("value not in enumeration");
    }
    if (v.is_number()) {
        double x = v.get<double>();
        if (s.contains("minimum") && x < s["minimum"].get<double>())
            add("below minimum " + s["minimum"].dump());
        if (s.contains("maximum") && x > s["maximum"].get<double>())
            add("above maximum " + s["maximum"].dump());
        if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
            add("must exceed " + s["exclusiveMinimum"].dump());
    }
    if (v.is_string() && s.contains("pattern")) {
        std::regex re(s["pattern"].get<std::string>());
        if (!std::regex_search(v.get<std::string>(), re))
            add("does not match pattern " + s["pattern"].get<std::string>());
    }
    if (v.is_array()) {
        if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
            add("fewer than " + s["minItems"].dump() + " items");
        if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
            add("more than " + s["maxItems"].dump() + " items");
        if (s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i)
                check(v[i], s["items"], path + "/" + std::to_string(i), out);
    }
    if (v.is_object()) {
        const json props = s.value("properties", json::object());
        if (s.contains("required"))
            for (const auto& r : s["required"]) {
                auto key = r.get<std::string>();
                if (!v.contains(key))
                    out.push_back({path + "/" + key, "required field missing"});
            }
        bool open = s.value("additionalProperties", false);
        for (auto it = v.begin(); it != v.end(); ++it) {
            auto child = path + "/" + it.key();
            if (props.contains(it.key()))
                check(it.value(), props[it.key()], child, out);
            else if (!open)
                out.push_back({child, "unknown key"});
        }
    }
}

}  // namespace

std::vector<Violation> validate_against(const json& doc, const json& schema)
{
    std::vector<Violation> out;
    check(doc, schema, "", out);
    return out;
}

std::vector<Violation> validate_schema(const json& doc, std::string_view schema_id)
{
    const auto& schemas = constants().schemas;
    auto key = std::string(schema_id);
    if (!schemas.contains(key))
        raise(ErrorKind::NotFound, "unknown schema id '" + key + "'");
    return validate_against(doc, schemas[key]);
}

std::string format_violations(const std::vector<Violation>& v)
{
    std::string s;
    for (const auto& x : v) {
        if (!s.empty())
            s += "; ";
        s += x.path + ": " + x.message;
    }
    return s;
}

}  // namespace olrw::config
