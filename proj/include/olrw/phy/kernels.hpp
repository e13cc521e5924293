/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "olrw/phy/chirp.hpp"
#include "olrw/phy/params.hpp"

// Batch PHY kernels. The parallel versions split work with OpenMP; results depend
// only on inputs and seeds, never on thread count. Serial references live in
// olrw::phy::reference and are kept for testing and benchmarking.

namespace olrw::phy::kernels {

/// Demodulates `count` consecutive symbol windows starting at sample `start`,
/// removing an integer carrier offset of `cfo_bins`.
std::vector<DemodResult> demodulate_symbols(std::span<const Sample> iq, std::size_t start, std::size_t count,
                                            const PhyParams& p, int cfo_bins = 0);

/// Adds complex AWGN of per-sample SNR `snr_db` relative to unit signal power.
void add_awgn(std::span<Sample> iq, double snr_db, std::uint64_t seed);

struct SymbolTrialStats {
    std::size_t trials = 0;
    std::size_t correct = 0;
    double success_rate() const { return trials ? static_cast<double>(correct) / trials : 0.0; }
};

/// Monte-Carlo: random symbol, AWGN at snr_db, demodulate. Trial t draws from stream (seed, t).
SymbolTrialStats symbol_trials(const PhyParams& p, double snr_db, std::size_t trials, std::uint64_t seed);

/// Lowest SNR on the grid whose recovery rate reaches `target`; the grid is scanned upward.
double recovery_threshold_db(const PhyParams& p, std::span<const double> snr_grid_db, double target,
                             std::size_t trials, std::uint64_t seed);

}  // namespace olrw::phy::kernels

namespace olrw::phy::reference {

/// Direct O(N^2) DFT demodulation, one symbol at a time.
std::vector<DemodResult> demodulate_symbols_dft(std::span<const Sample> iq, std::size_t start, std::size_t count,
                                                const PhyParams& p, int cfo_bins = 0);

kernels::SymbolTrialStats symbol_trials_serial(const PhyParams& p, double snr_db, std::size_t trials,
                                               std::uint64_t seed);

}  // namespace olrw::phy::reference
