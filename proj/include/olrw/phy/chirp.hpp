/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "olrw/phy/params.hpp"

namespace olrw::phy {

struct DemodResult {
    std::uint16_t symbol = 0;
    /// Peak DFT magnitude over the mean off-peak magnitude; ~1 means no distinguishable tone.
    float peak_metric = 1.0f;
};

/// Base upchirp for a spreading factor, cached per sf.
const std::vector<Sample>& base_upchirp(int sf);

/// Symbol chirp: sample n has phase 2*pi*n*(s/2^sf + n/(2*2^sf)), unit magnitude.
IQBuffer chirp_modulate(std::uint32_t symbol, const PhyParams& p);

/// Dechirp with the conjugate base chirp, take a 2^sf point DFT and pick the strongest bin.
DemodResult chirp_demodulate(std::span<const Sample> iq, const PhyParams& p);
DemodResult chirp_demodulate(const IQBuffer& iq, const PhyParams& p);

/// Full frame waveform: preamble upchirps, the two sync symbols, 2.25 downchirps, data symbols.
IQBuffer modulate_frame(const SymbolBlock& block, const PhyParams& p);

/// Samples in a modulated frame: (preamble + 4.25 + data symbols) * 2^sf.
std::size_t frame_samples(std::size_t data_symbols, const PhyParams& p);

namespace detail {

/// Power spectrum |DFT(x * reference)|^2 of one symbol window.
void dechirped_power(std::span<const Sample> window, std::span<const Sample> reference, std::vector<float>& power);

/// Bin magnitudes of the dechirped window (used by the demodulator).
void dechirped_magnitude(std::span<const Sample> window, const std::vector<Sample>& conj_ref,
                         std::vector<float>& mag);

DemodResult pick_peak(const std::vector<float>& mag);

}  // namespace detail

}  // namespace olrw::phy
