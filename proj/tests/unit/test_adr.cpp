/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "doctest.h"
#include "olrw/common/rng.hpp"
#include "olrw/du/adr.hpp"

using namespace olrw;
using namespace olrw::du;

TEST_CASE("adr proposals")
{
    const std::vector<double> zero{0.0, -3.0, -1.0};
    // sf12, max snr 0: margin = 0 + 20 - 10 = 10 dB, floor(10 / 3) = 3 steps.
    CHECK(adr_propose(zero, 12, 14) == AdrCommand{9, 14});
    // Margin exactly 0.
    const std::vector<double> m0{-10.0};
    CHECK_FALSE(adr_propose(m0, 12, 14).has_value());
    // sf7 at the power floor with positive margin.
    const std::vector<double> high{20.0};
    CHECK_FALSE(adr_propose(high, 7, 2).has_value());
    // sf7 with positive margin steps power down: margin 20 + 7.5 - 10 = 17.5, 5 steps.
    CHECK(adr_propose(high, 7, 14) == AdrCommand{7, 4});
    // Leftover steps after sf7 go to power: sf9 margin 22.5 -> 7 steps, 2 on sf, 5 on power.
    CHECK(adr_propose(high, 9, 14) == AdrCommand{7, 4});
    // Negative margin raises power first, then sf: sf7 at 8 dBm, snr -20: margin -22.5,
    // 7 steps, 3 on power and 4 on sf.
    const std::vector<double> low{-20.0};
    CHECK(adr_propose(low, 7, 8) == AdrCommand{11, 14});
    // Truncation toward zero: sf10, snr -7.9, margin -2.9 makes no change.
    const std::vector<double> slight{-7.9};
    CHECK_FALSE(adr_propose(slight, 10, 14).has_value());
    CHECK_THROWS(adr_propose(std::vector<double>{}, 7, 14));
}

TEST_CASE("adr monotone in snr")
{
    Rng rng(77);
    for (int t = 0; t < 2000; ++t) {
        std::vector<double> h(1 + rng() % 20);
        for (auto& x : h)
            x = -30.0 + static_cast<double>(rng() % 600) / 10.0;
        const int sf = 7 + static_cast<int>(rng() % 6);
        const int pw = 2 + 2 * static_cast<int>(rng() % 7);
        const double delta = 0.1 + static_cast<double>(rng() % 200) / 10.0;
        auto shifted = h;
        for (auto& x : shifted)
            x += delta;
        const int a = adr_propose(h, sf, pw).value_or(AdrCommand{sf, pw}).sf;
        const int b = adr_propose(shifted, sf, pw).value_or(AdrCommand{sf, pw}).sf;
        CHECK(b <= a);
    }
}

TEST_CASE("adr tracker history and rate limit")
{
    AdrTracker t;
    int sf = 12, pw = 14;
    std::vector<int> commanded_at;
    for (int n = 1; n <= 40; ++n) {
        if (auto c = t.on_uplink(10.0, sf, pw)) {
            commanded_at.push_back(n);
            sf = c->sf;
            pw = c->tx_power_dbm;
            CHECK(t.history().empty());
        }
    }
    // 5 uplinks to the first command, then 10 between commands.
    REQUIRE(commanded_at.size() >= 2);
    CHECK(commanded_at[0] == 5);
    CHECK(commanded_at[1] == 15);
    CHECK(sf == 7);

    AdrTracker u;
    for (int n = 0; n < 30; ++n)
        u.on_uplink(0.0, 7, 14);
    CHECK(u.history().size() == 20);
}
