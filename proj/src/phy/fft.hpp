/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <complex>
#include <cstddef>

namespace olrw::phy::detail {

/// Forward complex DFT of length n (FFTW, plans cached per size). in and out may not alias.
void fft_forward(const std::complex<float>* in, std::complex<float>* out, std::size_t n);

}  // namespace olrw::phy::detail
