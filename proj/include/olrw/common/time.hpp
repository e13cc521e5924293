/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <cstdint>

namespace olrw {

/// Simulation time in nanoseconds since scenario start (UTC epoch 0 at start).
using SimTime = std::int64_t;

constexpr SimTime kNsPerMs = 1'000'000;
constexpr SimTime kNsPerSec = 1'000'000'000;

constexpr SimTime from_seconds(double s) { return static_cast<SimTime>(std::llround(s * 1e9)); }
constexpr SimTime from_ms(double ms) { return static_cast<SimTime>(std::llround(ms * 1e6)); }
constexpr double to_seconds(SimTime t) { return static_cast<double>(t) / 1e9; }

}  // namespace olrw
