/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <map>
#include <string>

#include "olrw/common/time.hpp"

namespace olrw {

/// Telemetry currency shared by the RU, DU, NS and RIC. Metric names are flat
/// strings; per-device values use "device/<addr>/<name>".
struct KpiRecord {
    std::string node_id;
    SimTime timestamp = 0;
    std::map<std::string, double> metrics;

    bool operator==(const KpiRecord&) const = default;
};

}  // namespace olrw
