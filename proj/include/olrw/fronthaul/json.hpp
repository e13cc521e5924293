/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>

#include <json.hpp>

#include "olrw/fronthaul/codec.hpp"
#include "olrw/fronthaul/section.hpp"

namespace olrw::fronthaul {

/// Structured-text form used by the codec CLI; absent optionals are omitted.
nlohmann::json section_to_json(const LoRaWANSection& s);
/// Throws Parse on unknown keys or wrong types.
LoRaWANSection section_from_json(const nlohmann::json& j);

/// Human-readable multi-line rendering, one attribute per line in table order.
std::string format_section(const LoRaWANSection& s);
std::string format_ecpri_header(const EcpriHeader& h);

}  // namespace olrw::fronthaul
