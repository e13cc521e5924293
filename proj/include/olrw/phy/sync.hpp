/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "olrw/phy/chirp.hpp"
#include "olrw/phy/params.hpp"

namespace olrw::phy {

struct PreambleDetection {
    bool found = false;
    std::int64_t offset = 0;  ///< first preamble sample (may be negative if the capture began mid-preamble)
    int cfo_bins = 0;
    bool sfd_found = false;
    std::int64_t data_start = 0;  ///< first data sample; valid when sfd_found
};

/// Correlates against the base upchirp to find the preamble, then uses the sync
/// symbols and downchirps to split timing from integer carrier offset. Coarse search
/// windows start below `search_limit` samples.
PreambleDetection preamble_detect(std::span<const Sample> iq, const PhyParams& p,
                                  std::size_t search_limit = std::numeric_limits<std::size_t>::max());
PreambleDetection preamble_detect(const IQBuffer& iq, const PhyParams& p);

struct LinkMetrics {
    double rssi_dbm = 0;
    double snr_db = 0;
};

/// rssi from mean sample power (unit power == reference_dbm); snr = rssi - noise floor.
LinkMetrics estimate_link_metrics(std::span<const Sample> iq, double noise_floor_dbm, double reference_dbm = 0.0);
LinkMetrics estimate_link_metrics(const IQBuffer& iq, double noise_floor_dbm, double reference_dbm = 0.0);

/// Thermal noise floor: -174 + 10 log10(bw) + NF, dBm.
double noise_floor_dbm(std::uint32_t bw_hz, double noise_figure_db);

struct FrameCapture {
    PreambleDetection detection;
    std::vector<DemodResult> symbols;  ///< every whole window from data_start to the buffer end
};

/// Detection plus per-symbol demodulation with carrier-offset removal. Requires the sfd.
FrameCapture receive_frame(std::span<const Sample> iq, const PhyParams& p,
                           std::size_t search_limit = std::numeric_limits<std::size_t>::max());

}  // namespace olrw::phy
