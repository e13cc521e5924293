/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/common/error.hpp"

namespace olrw {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Range: return "range";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Length: return "length";
    case ErrorKind::Format: return "format";
    case ErrorKind::UnknownType: return "unknown-type";
    case ErrorKind::Integrity: return "integrity";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::State: return "state";
    case ErrorKind::Scheduling: return "scheduling";
    case ErrorKind::DutyCycle: return "duty-cycle";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

void raise(ErrorKind kind, const std::string& what)
{
    throw Error(kind, std::string(to_string(kind)) + " error: " + what);
}

}  // namespace olrw
