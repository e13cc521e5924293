/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <deque>
#include <map>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "olrw/common/kpi.hpp"
#include "olrw/common/time.hpp"
#include "olrw/fronthaul/section.hpp"
#include "olrw/mac/frame.hpp"

namespace olrw::du {

struct DuConfig {
    double rx1_delay_s = 1.0;
    double rx2_delay_s = 2.0;
    int rx2_sf = 12;
    std::uint32_t rx2_channel_hz = 869525000;
    double duty_cycle_limit = 0.01;
    bool adr_enabled = true;
    std::string ns_endpoint = "ns";
    int dl_tx_power_dbm = 14;

    bool operator==(const DuConfig&) const = default;
};

/// Defaults from the constants registry.
DuConfig default_config();
void validate(const DuConfig& cfg);
nlohmann::json to_json(const DuConfig& cfg);
/// Merges o1.du keys into a copy of `base`; the result is validated.
DuConfig merge(const DuConfig& base, const nlohmann::json& delta);

struct UplinkRecord {
    Bytes frame;  ///< MAC frame octets as recovered
    mac::MacFrame mac_frame;
    std::string gateway_id;
    double snr_db = 0;
    double rssi_dbm = 0;
    SimTime timestamp = 0;  ///< receive-finished time, also the uplink end
    int sf = 7;
    std::uint32_t channel_hz = 0;
    bool mic_present = true;  ///< false when the MIC octets are structurally unset (all zero)

    bool operator==(const UplinkRecord&) const = default;
};

/// Structured-text line for the DU to NS transport (a JSON object).
std::string encode_record(const UplinkRecord& r);
UplinkRecord decode_record(std::string_view line);
/// Length-prefixed framing: decimal length, ':' then the record text.
std::string frame_record(const UplinkRecord& r);
std::vector<UplinkRecord> unframe_records(std::string_view stream);

/// Structural security checks; holds no keys. Parse errors on malformed frames.
UplinkRecord security_passthrough(UplinkRecord rec);

struct RxSlot {
    SimTime time = 0;
    std::uint32_t channel_hz = 0;
    int sf = 7;

    bool operator==(const RxSlot&) const = default;
};

struct RxWindows {
    RxSlot rx1;
    RxSlot rx2;
};

RxWindows schedule_rx_windows(SimTime uplink_end, std::uint32_t uplink_channel_hz, int uplink_sf, const DuConfig& cfg);

struct DlParams {
    std::uint32_t device_address = 0;
    int sf = 7;
    std::uint32_t channel_hz = 0;
    int tx_power_dbm = 14;
    SimTime slot = 0;
};

/// Sliding-window airtime budget per sub-band.
class DutyCycleTracker {
public:
    DutyCycleTracker(double limit, double window_s);
    void set_limit(double limit) { limit_ = limit; }
    double limit() const { return limit_; }
    /// Airtime already used in the window ending at `t` (inclusive of entries starting after t - window).
    double used_s(std::size_t band, SimTime t) const;
    bool allows(std::size_t band, SimTime start, double airtime_s) const;
    void record(std::size_t band, SimTime start, double airtime_s);

private:
    double limit_;
    SimTime window_;
    std::map<std::size_t, std::deque<std::pair<SimTime, double>>> used_;
};

/// One DU per gateway. Single-threaded; every entry point is called from the
/// owning event loop.
class DistributedUnit {
public:
    DistributedUnit(std::string gateway_id, DuConfig cfg = default_config());

    const std::string& gateway_id() const { return id_; }
    const DuConfig& config() const { return cfg_; }

    /// High-PHY recovery and MAC disassembly of one logical UL frame. Throws
    /// Integrity on CRC or FEC failure and Parse on a malformed MAC frame.
    UplinkRecord process_uplink(const std::vector<fronthaul::LoRaWANSection>& sections);
    UplinkRecord process_uplink(const fronthaul::LoRaWANSection& section);

    /// Fronthaul endpoint: buffers concatenated frames and returns the sections of a
    /// complete logical frame once the last one (concat clear) arrives.
    std::optional<std::vector<fronthaul::LoRaWANSection>> on_fronthaul(ByteView ecpri_frame);

    /// Counted wrapper around process_uplink: nullopt when recovery failed.
    std::optional<UplinkRecord> handle_uplink(const std::vector<fronthaul::LoRaWANSection>& sections);

    /// PHY assembly of a MAC frame into a DL section. Throws Range on tx power outside
    /// 2..20 dBm and DutyCycle when the sub-band budget would be exceeded.
    fronthaul::LoRaWANSection build_downlink(ByteView mac_frame, const DlParams& tx);
    Bytes build_downlink_frame(ByteView mac_frame, const DlParams& tx);

    RxWindows rx_windows(SimTime uplink_end, std::uint32_t channel_hz, int sf) const;

    /// NS delivery with a bounded drop-oldest retry queue. Returns records to deliver now.
    std::vector<UplinkRecord> forward_to_ns(UplinkRecord rec);
    void set_ns_reachable(bool up) { ns_up_ = up; }
    bool ns_reachable() const { return ns_up_; }
    /// Drains the retry queue when the NS is reachable.
    std::vector<UplinkRecord> flush_retry_queue();
    std::size_t retry_queue_depth() const { return retry_.size(); }

    /// Applies one control parameter. Throws NotFound for unknown paths or devices and
    /// Validation for bad values.
    void apply_control(const std::string& path, const nlohmann::json& value);
    const DuConfig& apply_config(const nlohmann::json& delta);

    /// Downlink tx power for a device (per-device override or the configured default).
    int dl_tx_power_for(std::uint32_t dev_addr) const;

    KpiRecord report(SimTime now) const;

    const DutyCycleTracker& duty() const { return duty_; }

private:
    std::string id_;
    DuConfig cfg_;
    DutyCycleTracker duty_;
    std::vector<fronthaul::LoRaWANSection> partial_;
    std::deque<UplinkRecord> retry_;
    bool ns_up_ = true;
    std::map<std::uint32_t, int> dl_power_override_;
    std::map<std::uint32_t, SimTime> known_devices_;

    struct Counters {
        std::uint64_t uplinks = 0;
        std::uint64_t integrity_errors = 0;
        std::uint64_t parse_errors = 0;
        std::uint64_t forwarded = 0;
        std::uint64_t dropped = 0;
        std::uint64_t downlinks = 0;
        std::uint64_t duty_rejections = 0;
        double dl_airtime_s = 0;
        double snr_sum = 0;
        double rssi_sum = 0;
    } counters_;
};

}  // namespace olrw::du
