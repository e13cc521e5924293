/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace olrw::config {

struct Violation {
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Validates `doc` against a registry schema. Unknown schema ids throw NotFound.
///
/// Supported keywords: type, properties, required, additionalProperties (bool,
/// default false), minimum, maximum, exclusiveMinimum, enum, items, minItems,
/// maxItems, pattern.
std::vector<Violation> validate_schema(const nlohmann::json& doc, std::string_view schema_id);

/// Same validator against an explicit schema document.
std::vector<Violation> validate_against(const nlohmann::json& doc, const nlohmann::json& schema);

std::string format_violations(const std::vector<Violation>& v);

}  // namespace olrw::config
