/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/phy/params.hpp"

#include <string>

#include "olrw/common/error.hpp"

namespace olrw::phy {

bool ldro_required(int sf, std::uint32_t bw_hz)
{
    // 16.384 ms == 2^11 chips at 125 kHz; compare exactly in integers.
    return (static_cast<std::uint64_t>(1) << sf) * 1000000ull >= 16384ull * bw_hz;
}

PhyParams PhyParams::make(int sf, std::uint32_t bw_hz, int cr, int preamble_len, bool crc_on)
{
    PhyParams p;
    p.sf = sf;
    p.bw_hz = bw_hz;
    p.cr = cr;
    p.preamble_len = preamble_len;
    p.crc_on = crc_on;
    p.validate();
    p.ldro = ldro_required(sf, bw_hz);
    return p;
}

void PhyParams::validate() const
{
    if (sf < 7 || sf > 12)
        raise(ErrorKind::Range, "sf " + std::to_string(sf) + " outside 7..12");
    if (bw_hz != 125000 && bw_hz != 250000 && bw_hz != 500000)
        raise(ErrorKind::Range, "bandwidth " + std::to_string(bw_hz) + " Hz not one of 125000/250000/500000");
    if (cr < 1 || cr > 4)
        raise(ErrorKind::Range, "cr " + std::to_string(cr) + " outside 1..4");
    if (preamble_len < 2 || preamble_len > 255)
        raise(ErrorKind::Range, "preamble_len " + std::to_string(preamble_len) + " outside 2..255");
}

}  // namespace olrw::phy
