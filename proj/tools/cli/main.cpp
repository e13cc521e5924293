/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <iostream>

#include "olrw/cli/cli.hpp"

int main(int argc, char** argv)
{
    return olrw::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
