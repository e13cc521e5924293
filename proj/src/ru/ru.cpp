/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/ru/ru.hpp"

#include <algorithm>
#include <cmath>

#include "olrw/common/error.hpp"
#include "olrw/config/constants.hpp"
#include "olrw/fronthaul/codec.hpp"
#include "olrw/phy/chirp.hpp"
#include "olrw/phy/sync.hpp"

namespace olrw::ru {

void validate(const RuConfig& cfg)
{
    if (cfg.channels.empty())
        raise(ErrorKind::Validation, "channels: must list at least one channel");
    if (cfg.sf_set.empty())
        raise(ErrorKind::Validation, "sf_set: must list at least one spreading factor");
    for (int sf : cfg.sf_set)
        if (sf < config::kMinSf || sf > config::kMaxSf)
            raise(ErrorKind::Validation, "sf_set: " + std::to_string(sf) + " outside 7..12");
    if (!(cfg.reporting_period_s > 0))
        raise(ErrorKind::Validation, "reporting_period_s: must be positive");
    if (cfg.noise_figure_db < 0 || cfg.noise_figure_db > 30)
        raise(ErrorKind::Validation, "noise_figure_db: outside 0..30");
    fronthaul::bandwidth_code(cfg.bw_hz);
}

nlohmann::json to_json(const RuConfig& cfg)
{
    return {{"channels", cfg.channels},
            {"sf_set", cfg.sf_set},
            {"noise_figure_db", cfg.noise_figure_db},
            {"tx_enabled", cfg.tx_enabled},
            {"reporting_period_s", cfg.reporting_period_s},
            {"iq_passthrough", cfg.iq_passthrough},
            {"adc_quantization", cfg.adc_quantization}};
}

RuConfig merge(const RuConfig& base, const nlohmann::json& delta)
{
    if (!delta.is_object())
        raise(ErrorKind::Validation, "RU configuration must be an object");
    RuConfig c = base;
    try {
        for (const auto& [k, v] : delta.items()) {
            if (k == "channels")
                c.channels = v.get<std::vector<std::uint32_t>>();
            else if (k == "sf_set") {
                c.sf_set = v.get<std::vector<int>>();
                std::sort(c.sf_set.begin(), c.sf_set.end());
                c.sf_set.erase(std::unique(c.sf_set.begin(), c.sf_set.end()), c.sf_set.end());
            } else if (k == "noise_figure_db")
                c.noise_figure_db = v.get<double>();
            else if (k == "tx_enabled")
                c.tx_enabled = v.get<bool>();
            else if (k == "reporting_period_s")
                c.reporting_period_s = v.get<double>();
            else if (k == "iq_passthrough")
                c.iq_passthrough = v.get<bool>();
            else if (k == "adc_quantization")
                c.adc_quantization = v.get<bool>();
            else
                raise(ErrorKind::Validation, k + ": unknown RU parameter");
        }
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Validation, std::string("RU configuration: ") + e.what());
    }
    validate(c);
    return c;
}

float quantize(float x, int bits)
{
    const float levels = static_cast<float>((1 << (bits - 1)) - 1);
    const float v = std::clamp(x, -1.0f, 1.0f);
    return std::round(v * levels) / levels;
}

void adc(std::vector<phy::Sample>& samples, int bits)
{
    float peak = 0;
    for (const auto& s : samples)
        peak = std::max({peak, std::abs(s.real()), std::abs(s.imag())});
    const float gain = peak > 0 ? 0.5f / peak : 1.0f;
    for (auto& s : samples)
        s = {quantize(s.real() * gain, bits), quantize(s.imag() * gain, bits)};
}

std::uint32_t dl_channel_hz(std::uint8_t index)
{
    const auto& plan = config::constants().channel_plan;
    if (index < plan.uplink_hz.size())
        return plan.uplink_hz[index];
    if (index == plan.uplink_hz.size())
        return plan.rx2_hz;
    raise(ErrorKind::Range, "downlink channel index " + std::to_string(index) + " not in the plan");
}

std::uint8_t dl_channel_index(std::uint32_t hz)
{
    const auto& plan = config::constants().channel_plan;
    if (auto i = plan.channel_index_of(hz))
        return static_cast<std::uint8_t>(*i);
    if (hz == plan.rx2_hz)
        return static_cast<std::uint8_t>(plan.uplink_hz.size());
    raise(ErrorKind::Range, "frequency " + std::to_string(hz) + " Hz is not a downlink channel");
}

double emitted_power_dbm(const RadioEvent& ev)
{
    return phy::estimate_link_metrics(ev.iq, 0.0).rssi_dbm;
}

RadioUnit::RadioUnit(std::string id, RuConfig cfg) : id_(std::move(id)), cfg_(std::move(cfg))
{
    validate(cfg_);
}

namespace {

SimTime samples_to_ns(std::size_t n, std::uint32_t bw_hz)
{
    return static_cast<SimTime>(std::llround(static_cast<double>(n) * 1e9 / bw_hz));
}

}  // namespace

std::vector<fronthaul::LoRaWANSection> RadioUnit::receive_sections(const RadioEvent& ev)
{
    const auto ch = std::find(cfg_.channels.begin(), cfg_.channels.end(), ev.channel_hz);
    if (ch == cfg_.channels.end()) {
        ++counters_.off_channel;
        return {};
    }
    if (ev.iq.samples.empty())
        raise(ErrorKind::Shape, "radio event without samples");

    std::vector<phy::Sample> digital = ev.iq.samples;
    if (cfg_.adc_quantization)
        adc(digital, config::constants().adc_bits);

    phy::PhyParams params;
    phy::FrameCapture cap;
    bool found = false;
    for (int sf : cfg_.sf_set) {
        params = phy::PhyParams::make(sf, cfg_.bw_hz);
        cap = phy::receive_frame(digital, params, kSearchLimit);
        if (cap.detection.sfd_found && !cap.symbols.empty()) {
            found = true;
            break;
        }
    }
    if (!found) {
        ++counters_.misses;
        return {};
    }

    // Link metrics from the analog capture: power over the frame, excess over the
    // configured noise floor.
    const std::size_t start = static_cast<std::size_t>(std::max<std::int64_t>(cap.detection.offset, 0));
    double acc = 0;
    for (std::size_t i = start; i < ev.iq.samples.size(); ++i)
        acc += std::norm(std::complex<double>(ev.iq.samples[i]));
    const std::size_t n = ev.iq.samples.size() - start;
    const double power = n ? acc / static_cast<double>(n) : 0.0;
    const double noise = std::pow(10.0, phy::noise_floor_dbm(cfg_.bw_hz, cfg_.noise_figure_db) / 10.0);
    const double rssi = power > 0 ? 10.0 * std::log10(power) : -256.0;
    const double snr = 10.0 * std::log10(std::max(power / noise - 1.0, 1e-3));

    fronthaul::LoRaWANSection base;
    base.direction = fronthaul::Direction::UL;
    base.payload_version = 1;
    base.spreading_factor = static_cast<std::uint8_t>(params.sf);
    base.bandwidth_code = fronthaul::bandwidth_code(cfg_.bw_hz);
    base.lorawan_version = static_cast<std::uint8_t>(config::constants().lorawan_version_code);
    base.uplink_snr_db = static_cast<std::int8_t>(std::clamp(std::lround(snr), -128L, 127L));
    base.uplink_rssi_dbm = static_cast<std::int16_t>(std::clamp(std::lround(rssi), -256L, -1L));
    // Receive-finished time: the end of the capture.
    base.timestamp_reception =
        static_cast<std::uint64_t>(ev.arrival_time + samples_to_ns(ev.iq.samples.size(), cfg_.bw_hz));
    base.timing_advance = static_cast<std::uint8_t>(std::clamp<std::int64_t>(cap.detection.offset / 16, 0, 255));
    if (auto idx = config::constants().channel_plan.channel_index_of(ev.channel_hz))
        base.channel_index = static_cast<std::uint8_t>(*idx);

    ++counters_.detections;
    counters_.snr_sum += *base.uplink_snr_db;
    counters_.rssi_sum += *base.uplink_rssi_dbm;
    last_timestamp_ = static_cast<SimTime>(*base.timestamp_reception);

    std::vector<fronthaul::LoRaWANSection> out;
    if (!cfg_.iq_passthrough) {
        auto s = base;
        s.section_id = next_section_++;
        std::vector<fronthaul::DemodEntry> d;
        d.reserve(cap.symbols.size());
        for (const auto& r : cap.symbols)
            d.push_back({r.symbol, fronthaul::quantize_metric(r.peak_metric)});
        s.demodulation_info = std::move(d);
        out.push_back(std::move(s));
        return out;
    }
    // Raw mode: the whole post-ADC capture, chunked; symbol detection moves to the DU.
    for (std::size_t off = 0; off < digital.size(); off += kIqChunkSamples) {
        const std::size_t len = std::min(kIqChunkSamples, digital.size() - off);
        auto s = base;
        s.section_id = next_section_++;
        s.demodulation_info = std::vector<fronthaul::DemodEntry>{};
        std::vector<float> i(len), q(len);
        for (std::size_t k = 0; k < len; ++k) {
            i[k] = digital[off + k].real();
            q[k] = digital[off + k].imag();
        }
        s.i_samples = std::move(i);
        s.q_samples = std::move(q);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Bytes> RadioUnit::receive(const RadioEvent& ev)
{
    const auto sections = receive_sections(ev);
    std::vector<Bytes> frames;
    frames.reserve(sections.size());
    for (std::size_t i = 0; i < sections.size(); ++i)
        frames.push_back(fronthaul::encode_frame(sections[i], i + 1 < sections.size()));
    return frames;
}

RadioEvent RadioUnit::transmit_section(const fronthaul::LoRaWANSection& s, SimTime now)
{
    if (!cfg_.tx_enabled)
        raise(ErrorKind::State, "RU " + id_ + " has transmission disabled");
    if (s.direction != fronthaul::Direction::DL)
        raise(ErrorKind::Validation, "RU transmit needs a DL section");
    const auto v = fronthaul::validate_section(s);
    if (!v.empty())
        raise(ErrorKind::Validation, fronthaul::format_violations(v));
    const SimTime slot = static_cast<SimTime>(*s.transmission_slot);
    if (slot < now)
        raise(ErrorKind::Scheduling, "transmission slot " + std::to_string(slot) + " ns is before now (" +
                                         std::to_string(now) + " ns)");
    const auto p = phy::PhyParams::make(s.spreading_factor, fronthaul::bandwidth_hz(s.bandwidth_code), 1,
                                        s.preamble_length.value_or(8), false);
    phy::SymbolBlock block{p.preamble_len, *s.dl_payload};
    RadioEvent ev;
    ev.channel_hz = dl_channel_hz(s.channel_index.value_or(0));
    ev.iq = phy::modulate_frame(block, p);
    const float amp = static_cast<float>(std::pow(10.0, *s.tx_power_dbm / 20.0));
    const int bits = config::constants().adc_bits;
    for (auto& x : ev.iq.samples) {
        if (cfg_.adc_quantization)
            x = {quantize(x.real(), bits), quantize(x.imag(), bits)};
        x *= amp;
    }
    ev.true_tx_power_dbm = *s.tx_power_dbm;
    ev.arrival_time = slot;
    ++counters_.transmissions;
    return ev;
}

RadioEvent RadioUnit::transmit(ByteView ecpri_frame, SimTime now)
{
    return transmit_section(fronthaul::decode_frame(ecpri_frame), now);
}

bool RadioUnit::report_due(SimTime now) const
{
    return now - window_start_ >= from_seconds(cfg_.reporting_period_s);
}

KpiRecord RadioUnit::report(SimTime now)
{
    KpiRecord r;
    r.node_id = id_;
    r.timestamp = now;
    const auto& c = counters_;
    r.metrics["detections"] = static_cast<double>(c.detections);
    r.metrics["misses"] = static_cast<double>(c.misses);
    r.metrics["off_channel"] = static_cast<double>(c.off_channel);
    r.metrics["transmissions"] = static_cast<double>(c.transmissions);
    r.metrics["snr"] = c.detections ? c.snr_sum / static_cast<double>(c.detections) : 0.0;
    r.metrics["rssi"] = c.detections ? c.rssi_sum / static_cast<double>(c.detections) : 0.0;
    r.metrics["window_s"] = to_seconds(now - window_start_);
    counters_ = {};
    window_start_ = now;
    return r;
}

const RuConfig& RadioUnit::apply_config(const nlohmann::json& delta)
{
    cfg_ = merge(cfg_, delta);
    return cfg_;
}

}  // namespace olrw::ru
