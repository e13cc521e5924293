/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace olrw::phy::detail {
namespace {

// Plan creation is not thread-safe in FFTW; execution of an existing plan with
// new-array execute is. Plans are created once per size under a lock.
std::mutex g_plan_mutex;

struct PlanCache {
    std::map<std::size_t, fftwf_plan> plans;
    ~PlanCache()
    {
        for (auto& kv : plans)
            fftwf_destroy_plan(kv.second);
    }
};

fftwf_plan plan_for(std::size_t n)
{
    static PlanCache cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = cache.plans.find(n);
    if (it != cache.plans.end())
        return it->second;
    std::vector<std::complex<float>> a(n), b(n);
    fftwf_plan plan = fftwf_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftwf_complex*>(a.data()),
                                        reinterpret_cast<fftwf_complex*>(b.data()), FFTW_FORWARD,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.plans.emplace(n, plan);
    return plan;
}

}  // namespace

void fft_forward(const std::complex<float>* in, std::complex<float>* out, std::size_t n)
{
    fftwf_plan plan = plan_for(n);
    // Out-of-place complex transforms preserve their input.
    fftwf_execute_dft(plan, reinterpret_cast<fftwf_complex*>(const_cast<std::complex<float>*>(in)),
                      reinterpret_cast<fftwf_complex*>(out));
}

}  // namespace olrw::phy::detail
