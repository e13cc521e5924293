/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/netsim/events.hpp"

#include "olrw/common/error.hpp"

namespace olrw::netsim {

void EventQueue::schedule(SimTime at, std::string label, Action action)
{
    if (at < now_)
        raise(ErrorKind::Scheduling, "event '" + label + "' at " + std::to_string(at) + " ns is before now (" +
                                         std::to_string(now_) + " ns)");
    heap_.push({at, seq_++, std::move(label), std::move(action)});
}

bool EventQueue::step()
{
    if (heap_.empty())
        return false;
    // The action may schedule more events, so move it out before popping.
    Event ev = std::move(const_cast<Event&>(heap_.top()));
    heap_.pop();
    now_ = ev.time;
    if (tracer_)
        tracer_(ev.time, ev.label);
    ++executed_;
    ev.action();
    return true;
}

void EventQueue::run_until(SimTime end)
{
    while (!heap_.empty() && heap_.top().time <= end)
        step();
    if (end > now_)
        now_ = end;
}

void EventQueue::run()
{
    while (step()) {
    }
}

}  // namespace olrw::netsim
