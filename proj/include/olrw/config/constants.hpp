/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace olrw::config {

inline constexpr int kMinSf = 7;
inline constexpr int kMaxSf = 12;
inline constexpr int kSfCount = kMaxSf - kMinSf + 1;

/// Per-sf table indexed by sf 7..12.
template <typename T>
struct SfTable {
    std::array<T, kSfCount> values{};

    const T& operator[](int sf) const { return values.at(static_cast<std::size_t>(sf - kMinSf)); }
    T& operator[](int sf) { return values.at(static_cast<std::size_t>(sf - kMinSf)); }
};

struct SubBand {
    std::string name;
    std::uint32_t min_hz = 0;
    std::uint32_t max_hz = 0;
};

struct ChannelPlan {
    std::vector<std::uint32_t> uplink_hz;
    std::uint32_t rx2_hz = 0;
    int rx2_sf = 12;
    std::uint32_t bw_hz = 125000;
    std::vector<SubBand> sub_bands;

    /// Index into sub_bands, or nullopt when the frequency lies outside every band.
    std::optional<std::size_t> sub_band_of(std::uint32_t hz) const;
    /// Index into uplink_hz, or nullopt.
    std::optional<std::size_t> channel_index_of(std::uint32_t hz) const;
};

struct ChannelModel {
    double path_loss_exponent = 2.7;
    double reference_loss_db = 74.0;
    double reference_distance_m = 1.0;
    double noise_figure_db = 6.0;
};

struct ConstantsRegistry {
    double adr_margin_db = 0;
    SfTable<double> adr_required_snr_db;
    double adr_step_db = 0;
    int adr_power_step_db = 0;
    int adr_min_history = 0;
    int adr_history_len = 0;
    int adr_command_interval_uplinks = 0;

    int device_max_tx_power_dbm = 0;
    int device_min_tx_power_dbm = 0;
    int dl_tx_power_min_dbm = 0;
    int dl_tx_power_max_dbm = 0;
    int gateway_tx_power_dbm = 0;

    double duty_cycle_limit = 0;
    double duty_cycle_window_s = 0;

    SfTable<int> max_app_payload_octets;
    std::map<int, double> device_tx_current_ma;
    double device_supply_voltage_v = 0;
    double device_battery_capacity_mah = 0;

    double capture_threshold_db = 0;
    SfTable<SfTable<double>> cross_sf_rejection_db;

    ChannelPlan channel_plan;
    ChannelModel channel_model;

    double rx1_delay_s = 0;
    double rx2_delay_s = 0;
    int dedup_window_ms = 0;
    int du_retry_queue_capacity = 0;
    int ns_dl_lead_ms = 0;
    int backhaul_latency_ms = 0;
    int gateway_internal_latency_us = 0;

    int near_rt_min_ms = 0;
    int near_rt_max_ms = 0;
    int e2_link_latency_ms = 0;
    int xapp_processing_ms = 0;
    int ric_control_period_ms = 0;

    double steering_hysteresis_db = 0;
    int steering_window = 0;
    int energy_min_history = 0;
    double energy_lifetime_threshold_days = 0;
    double rapp_high_sf_energy_share = 0;

    int lorawan_version_code = 0;
    int adc_bits = 0;
    double sensitivity_gate_db = 0;

    /// constant name -> source tag ("architecture" | "decision").
    std::map<std::string, std::string> sources;
    nlohmann::json schemas;

    double required_snr_db(int sf) const { return adr_required_snr_db[sf]; }
    /// Transmit current for a power level; levels between table rows take the next higher row.
    double tx_current_ma(int tx_power_dbm) const;
    double battery_capacity_j() const { return device_battery_capacity_mah * 3.6 * device_supply_voltage_v; }

    bool operator==(const ConstantsRegistry&) const = default;
};

/// Parses a constants document. Malformed input throws Validation.
ConstantsRegistry load_constants(std::string_view json_text);
ConstantsRegistry load_constants_file(const std::filesystem::path& path);

/// Process-wide registry parsed once from the constants file compiled into the library.
const ConstantsRegistry& constants();

}  // namespace olrw::config
