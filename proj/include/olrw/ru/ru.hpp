/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "olrw/common/kpi.hpp"
#include "olrw/common/time.hpp"
#include "olrw/fronthaul/section.hpp"
#include "olrw/phy/params.hpp"

namespace olrw::ru {

struct RuConfig {
    std::vector<std::uint32_t> channels{868100000, 868300000, 868500000};
    std::vector<int> sf_set{7, 8, 9, 10, 11, 12};
    double noise_figure_db = 6.0;
    bool tx_enabled = true;
    double reporting_period_s = 60.0;
    bool iq_passthrough = false;
    /// Off: no AGC or quantizer, so IQ passthrough carries the analog buffer unchanged.
    bool adc_quantization = true;
    std::uint32_t bw_hz = 125000;

    bool operator==(const RuConfig&) const = default;
};

/// Throws Validation naming the offending field.
void validate(const RuConfig& cfg);

nlohmann::json to_json(const RuConfig& cfg);
/// Merges a partial document (o1.ru keys) into a copy of `base`; the result is validated.
RuConfig merge(const RuConfig& base, const nlohmann::json& delta);

struct RadioEvent {
    std::uint32_t channel_hz = 0;
    phy::IQBuffer iq;  ///< sample units: unit power == 0 dBm
    double true_tx_power_dbm = 0;
    SimTime arrival_time = 0;  ///< time of the first sample
};

/// Uniform quantizer over +-1.0 full scale; `bits` includes the sign.
float quantize(float x, int bits);

/// Scales the buffer so its largest component sits at half scale, then quantizes
/// each component. Codes are kept normalized (no rescale to physical units).
void adc(std::vector<phy::Sample>& samples, int bits);

/// Largest sample count carried per IQ section.
constexpr std::size_t kIqChunkSamples = 4096;
/// Coarse preamble search window at every sf.
constexpr std::size_t kSearchLimit = 8192;

class RadioUnit {
public:
    RadioUnit(std::string id, RuConfig cfg);

    const std::string& id() const { return id_; }
    const RuConfig& config() const { return cfg_; }

    /// Capture, ADC, detection and symbol demodulation. Returns the UL sections of one
    /// frame (several when IQ is chunked), or nothing on a miss or an off-channel event.
    std::vector<fronthaul::LoRaWANSection> receive_sections(const RadioEvent& ev);

    /// receive_sections encoded as eCPRI frames (concat set on all but the last).
    std::vector<Bytes> receive(const RadioEvent& ev);

    /// Modulates a DL section at its transmission slot. Throws State when tx is
    /// disabled and Scheduling when the slot is already past.
    /// The carrier comes from the section's channel index (see dl_channel_hz).
    RadioEvent transmit_section(const fronthaul::LoRaWANSection& s, SimTime now);
    RadioEvent transmit(ByteView ecpri_frame, SimTime now);

    /// Counters since the previous report; the window then restarts at `now`.
    KpiRecord report(SimTime now);
    /// Whether a report is due under the configured period.
    bool report_due(SimTime now) const;

    const RuConfig& apply_config(const nlohmann::json& delta);

private:
    std::string id_;
    RuConfig cfg_;
    std::uint8_t next_section_ = 0;
    SimTime window_start_ = 0;
    SimTime last_timestamp_ = 0;

    struct Counters {
        std::uint64_t detections = 0;
        std::uint64_t misses = 0;
        std::uint64_t off_channel = 0;
        std::uint64_t transmissions = 0;
        double snr_sum = 0;
        double rssi_sum = 0;
    } counters_;
};

/// Downlink channel indices: the uplink channels of the plan, then the RX2 channel.
std::uint32_t dl_channel_hz(std::uint8_t index);
std::uint8_t dl_channel_index(std::uint32_t hz);

/// Emitted power of a transmitted event, from its mean sample power.
double emitted_power_dbm(const RadioEvent& ev);

}  // namespace olrw::ru
