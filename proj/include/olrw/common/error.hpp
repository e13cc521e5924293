/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace olrw {

enum class ErrorKind {
    Range,
    Shape,
    Validation,
    Length,
    Format,
    UnknownType,
    Integrity,
    Parse,
    State,
    Scheduling,
    DutyCycle,
    Conflict,
    NotFound,
    Consistency,
    Timeout,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

}  // namespace olrw
