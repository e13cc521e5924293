/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "olrw/common/kpi.hpp"
#include "olrw/du/adr.hpp"
#include "olrw/du/du.hpp"
#include "olrw/mac/frame.hpp"

namespace olrw::ns {

struct NsConfig {
    int dedup_window_ms = 200;
    bool adr_enabled = true;

    bool operator==(const NsConfig&) const = default;
};

NsConfig default_config();
nlohmann::json to_json(const NsConfig& cfg);
/// Merges o1.ns keys; unknown keys and bad values throw Validation.
NsConfig merge(const NsConfig& base, const nlohmann::json& delta);

struct GatewayObservation {
    std::string gateway_id;
    double snr_db = 0;
    double rssi_dbm = 0;
    SimTime timestamp = 0;

    bool operator==(const GatewayObservation&) const = default;
};

/// One accepted uplink after merging every copy heard in the dedup window.
struct MergedUplink {
    std::uint32_t dev_addr = 0;
    std::uint32_t fcnt = 0;  ///< 32-bit extended counter
    mac::MacFrame frame;
    Bytes payload;  ///< decrypted FRMPayload
    int sf = 7;
    std::uint32_t channel_hz = 0;
    SimTime uplink_end = 0;  ///< earliest receive-finished timestamp among the copies
    SimTime merged_at = 0;
    std::vector<GatewayObservation> gateways;  ///< sorted by gateway id

    double best_snr_db() const;
};

/// Downlink gateway: argmax snr, ties to the lexicographically smallest id.
/// An empty gateway list throws Validation.
std::string select_downlink_gateway(const std::vector<GatewayObservation>& gws);

enum class RxWindow { RX1, RX2 };
const char* to_string(RxWindow w);

struct DownlinkItem {
    std::uint32_t dev_addr = 0;
    Bytes payload;
    std::uint8_t fport = 1;
    int priority = 0;
    std::uint64_t seq = 0;  ///< enqueue order, the tie-break within one priority
};

/// A transmission opportunity for one merged uplink of a Class A device.
struct DlOpportunity {
    std::uint32_t dev_addr = 0;
    std::string gateway_id;
    du::RxWindows windows;
    int tx_power_dbm = 14;
};

struct DlDispatch {
    std::uint32_t dev_addr = 0;
    std::string gateway_id;
    RxWindow window = RxWindow::RX1;
    du::DlParams params;
    Bytes mac_frame;
    std::uint32_t fcnt_down = 0;
    std::optional<DownlinkItem> item;
    std::optional<du::AdrCommand> adr;
};

/// Sends a dispatch to the gateway. Throws DutyCycle when the gateway refuses the slot.
using DlSender = std::function<void(const DlDispatch&)>;

enum class IngestResult { Opened, Merged, RejectedUnknown, RejectedMic, RejectedReplay, RejectedDirection };
const char* to_string(IngestResult r);

/// AS event-log record, one JSON object per line.
nlohmann::json as_record(const MergedUplink& m);

/// O-LoRaWAN network server. Single logical event loop; shards by dev_addr would
/// share nothing.
class NetworkServer {
public:
    explicit NetworkServer(NsConfig cfg = default_config());

    const NsConfig& config() const { return cfg_; }

    /// Registers an ABP session. A duplicate dev_addr throws Conflict.
    void register_device(const mac::DeviceSession& session);
    bool knows(std::uint32_t dev_addr) const { return devices_.count(dev_addr) != 0; }
    const mac::DeviceSession& session(std::uint32_t dev_addr) const;

    /// Verifies one copy (MIC and counter against the session) and files it in the
    /// dedup buffer. The first copy opens a window of dedup_window_ms.
    IngestResult ingest(const du::UplinkRecord& rec, SimTime now);

    /// Earliest open window close time.
    std::optional<SimTime> next_close() const;

    /// Closes every window due at `now`: counters advance, payloads are decrypted and
    /// forwarded to the AS, and NS-side ADR runs. Windows close in (close time, key) order.
    std::vector<MergedUplink> close_due(SimTime now);

    /// Gateway for a downlink answering `m`, honouring a steering override when the
    /// override gateway heard the uplink.
    std::string downlink_gateway(const MergedUplink& m) const;

    /// Queues application data for a device. Unknown devices throw NotFound.
    void enqueue_downlink(std::uint32_t dev_addr, Bytes payload, std::uint8_t fport = 1,
                          std::optional<int> priority = std::nullopt);
    std::size_t queue_depth(std::uint32_t dev_addr) const;

    /// True when a downlink would carry something (data, ACK or an ADR command).
    bool has_pending(std::uint32_t dev_addr) const;

    /// Builds the next downlink for the opportunity, trying RX1 then RX2. A DutyCycle
    /// refusal in both windows defers everything to the next uplink and returns nullopt.
    std::optional<DlDispatch> schedule_downlink(const DlOpportunity& opp, const DlSender& send);

    /// Appends AS records to a stream as they are produced (one line each).
    void set_as_sink(std::ostream* os) { as_sink_ = os; }
    const std::vector<nlohmann::json>& as_log() const { return as_log_; }

    /// Control dictionary: adr_enabled, dedup_window_ms, device/<addr>/adr {sf, tx_power_dbm},
    /// device/<addr>/dl_gateway, device/<addr>/priority. Unknown paths or devices throw NotFound.
    void apply_control(const std::string& path, const nlohmann::json& value);
    const NsConfig& apply_config(const nlohmann::json& delta);

    /// Aggregate counters for the E2/O1 surface.
    KpiRecord report(SimTime now) const;
    /// Per-uplink indication: device/<addr>/{snr,sf,tx_power_dbm,fcnt,gateways,airtime_s,
    /// payload_octets} plus device/<addr>/gw/<id>/snr for every receiving gateway.
    KpiRecord uplink_kpi(const MergedUplink& m) const;

    /// Tx power the NS believes the device uses (confirmed through LinkADRAns).
    int assumed_tx_power(std::uint32_t dev_addr) const;
    const du::AdrTracker& adr_tracker(std::uint32_t dev_addr) const;
    std::optional<du::AdrCommand> pending_adr(std::uint32_t dev_addr) const;

private:
    struct Device {
        mac::DeviceSession session;
        du::AdrTracker tracker;
        int assumed_power = 14;
        std::optional<du::AdrCommand> pending_adr;  // queued, not yet sent
        std::optional<du::AdrCommand> sent_adr;     // sent, awaiting LinkADRAns
        bool ack_due = false;
        int priority = 0;
        std::optional<std::string> dl_gateway;
        std::vector<DownlinkItem> queue;
    };
    using Key = std::tuple<std::uint32_t, std::uint16_t, std::uint64_t>;
    struct Window {
        SimTime close_at = 0;
        du::UplinkRecord first;
        std::vector<GatewayObservation> gateways;
        SimTime uplink_end = 0;
    };

    Device& device(std::uint32_t dev_addr);
    const Device& device(std::uint32_t dev_addr) const;
    MergedUplink close(const Key& key, Window w, SimTime now);

    NsConfig cfg_;
    std::map<std::uint32_t, Device> devices_;
    std::map<Key, Window> windows_;
    std::vector<nlohmann::json> as_log_;
    std::ostream* as_sink_ = nullptr;
    std::uint64_t seq_ = 0;

    struct Counters {
        std::uint64_t copies = 0;
        std::uint64_t duplicates = 0;
        std::uint64_t merged = 0;
        std::uint64_t rejected_unknown = 0;
        std::uint64_t rejected_mic = 0;
        std::uint64_t rejected_replay = 0;
        std::uint64_t rejected_direction = 0;
        std::uint64_t downlinks = 0;
        std::uint64_t rx1 = 0;
        std::uint64_t rx2 = 0;
        std::uint64_t deferred = 0;
        std::uint64_t adr_commands = 0;
    } counters_;
};

}  // namespace olrw::ns
