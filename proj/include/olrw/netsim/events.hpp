/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "olrw/common/time.hpp"

namespace olrw::netsim {

/// Discrete-event clock. Events run in (time, insertion sequence) order; ties keep
/// scheduling order.
class EventQueue {
public:
    using Action = std::function<void()>;

    SimTime now() const { return now_; }

    /// Throws Scheduling for a time before now.
    void schedule(SimTime at, std::string label, Action action);

    /// Runs the earliest event. False when the queue is empty.
    bool step();
    /// Runs every event with time <= `end`; the clock then reads `end`.
    void run_until(SimTime end);
    void run();

    bool empty() const { return heap_.empty(); }
    std::size_t pending() const { return heap_.size(); }
    std::uint64_t executed() const { return executed_; }

    /// Called with (time, label) as each event runs.
    void set_tracer(std::function<void(SimTime, const std::string&)> t) { tracer_ = std::move(t); }

private:
    struct Event {
        SimTime time;
        std::uint64_t seq;
        std::string label;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    SimTime now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t executed_ = 0;
    std::function<void(SimTime, const std::string&)> tracer_;
};

}  // namespace olrw::netsim
