/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "olrw/netsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "olrw/common/error.hpp"
#include "olrw/common/hash.hpp"
#include "olrw/common/rng.hpp"
#include "olrw/fronthaul/codec.hpp"
#include "olrw/mac/frame.hpp"
#include "olrw/netsim/channel.hpp"
#include "olrw/netsim/events.hpp"
#include "olrw/ns/ns.hpp"
#include "olrw/phy/chain.hpp"
#include "olrw/phy/chirp.hpp"
#include "olrw/phy/sync.hpp"
#include "olrw/smo/smo.hpp"

namespace olrw::netsim {

using nlohmann::json;

Bytes capture_file(const std::vector<CaptureRecord>& records)
{
    std::vector<Bytes> frames;
    frames.reserve(records.size());
    for (const auto& r : records)
        frames.push_back(r.frame);
    return fronthaul::encode_capture(frames);
}

std::string report_text(const json& report) { return report.dump(2) + "\n"; }

std::pair<int, int> predicted_adr_terminal(double d_m, int sf, int tx_power_dbm, const config::ChannelModel& m)
{
    const auto& c = config::constants();
    for (int guard = 0; guard < 64; ++guard) {
        const double snr = link_snr_db(tx_power_dbm, d_m, phy::PhyParams::make(sf), m);
        const std::vector<double> hist(static_cast<std::size_t>(c.adr_min_history), snr);
        const auto cmd = du::adr_propose(hist, sf, tx_power_dbm, c);
        if (!cmd)
            break;
        sf = cmd->sf;
        tx_power_dbm = cmd->tx_power_dbm;
    }
    return {sf, tx_power_dbm};
}

namespace {

enum class Heard { Below, Collided, CrcFailed, Received };

const char* bucket_name(Heard h)
{
    switch (h) {
    case Heard::Below: return "below_sensitivity";
    case Heard::Collided: return "collided";
    case Heard::CrcFailed: return "crc_failed";
    case Heard::Received: return "delivered";
    }
    return "?";
}

struct Transmission {
    std::uint64_t id = 0;
    std::uint32_t dev = 0;
    std::uint32_t fcnt = 0;
    int sf = 7;
    int power = 14;
    std::uint32_t channel = 0;
    SimTime start = 0;
    SimTime end = 0;
    std::vector<phy::Sample> wave;  // unit amplitude, released after reception
    std::vector<Heard> at;          // per gateway
    bool ns_rejected = false;
    bool delivered = false;
};

struct Device {
    DeviceSpec spec;
    mac::DeviceSession session;
    int sf = 7;
    int power = 14;
    Rng rng;
    Bytes pending_ans;
    // Listening state for the latest uplink.
    bool has_uplink = false;
    SimTime last_end = 0;
    std::uint32_t last_channel = 0;
    int last_sf = 7;
    bool rx1_got = false;

    std::uint64_t transmitted = 0;
    std::uint64_t delivered = 0;
    double energy_j = 0;
    std::uint64_t dl_received = 0;
    std::uint64_t dl_lost = 0;
    std::uint64_t acks = 0;
    std::uint64_t app_downlinks = 0;
    std::uint64_t adr_applied = 0;
    std::vector<int> sf_trace;
    std::vector<int> power_trace;
};

struct DlAir {
    std::size_t gw = 0;
    std::optional<std::size_t> band;
    SimTime start = 0;
    double airtime_s = 0;
    double limit = 0;
};

struct Gateway {
    GatewaySpec spec;
    Mode mode = Mode::Modular;
    std::unique_ptr<ru::RadioUnit> ru;
    std::unique_ptr<du::DistributedUnit> du;
    std::uint64_t received = 0;
    std::uint64_t collided = 0;
    std::uint64_t below = 0;
    std::uint64_t crc_failed = 0;
    std::uint64_t downlinks = 0;
    std::uint64_t fh_ul_frames = 0;
    std::uint64_t fh_dl_frames = 0;
    std::uint64_t fh_octets = 0;
};

/// Forwards to an xApp only while its O1 flag is on.
class GatedXApp : public ric::XApp {
public:
    GatedXApp(std::unique_ptr<ric::XApp> inner, const bool* enabled) : inner_(std::move(inner)), enabled_(enabled) {}
    std::string id() const override { return inner_->id(); }
    std::vector<ric::ControlCommand> on_indication(const KpiRecord& kpi, SimTime now) override
    {
        return *enabled_ ? inner_->on_indication(kpi, now) : std::vector<ric::ControlCommand>{};
    }
    void on_policies(const std::vector<ric::A1Policy>& active) override { inner_->on_policies(active); }

private:
    std::unique_ptr<ric::XApp> inner_;
    const bool* enabled_;
};

mac::DeviceSession session_for(std::uint32_t dev_addr)
{
    mac::DeviceSession s;
    s.dev_addr = dev_addr;
    for (std::size_t i = 0; i < 16; ++i) {
        s.nwk_skey[i] = static_cast<std::uint8_t>(derive_seed(dev_addr, {0x6E77, i}) & 0xFF);
        s.app_skey[i] = static_cast<std::uint8_t>(derive_seed(dev_addr, {0x6170, i}) & 0xFF);
    }
    return s;
}

SimTime samples_ns(std::size_t n, std::uint32_t bw_hz)
{
    return static_cast<SimTime>(n) * kNsPerSec / static_cast<SimTime>(bw_hz);
}

class Simulation {
public:
    Simulation(const Scenario& sc, const RunOptions& opt);
    SimResult run();

private:
    // Uplink path
    void uplink_start(std::size_t d);
    void uplink_end(std::uint64_t tx_id);
    Heard receive_at(std::size_t g, Transmission& tx);
    void to_ns(std::size_t g, const du::UplinkRecord& rec);
    void ns_ingest(std::size_t g, const du::UplinkRecord& rec);
    void ns_close();
    void dl_opportunity(const ns::MergedUplink& m);
    void send_downlink(const ns::DlDispatch& d);
    void downlink_air(std::size_t g, const ns::DlDispatch& d, const ru::RadioEvent& ev);
    void device_receive(Device& dev, std::size_t g, const ns::DlDispatch& d, const ru::RadioEvent& ev);

    // RIC path
    void setup_ric();
    void to_ric(const ric::E2Message& msg);
    void ric_tick();

    json build_report();
    std::vector<std::string> audit(json& report);

    std::size_t gateway_index(const std::string& id) const;
    std::size_t device_index(std::uint32_t addr) const { return device_index_.at(addr); }

    Scenario sc_;
    RunOptions opt_;
    std::uint64_t seed_;
    const config::ConstantsRegistry& c_ = config::constants();
    SimTime end_time_;
    SimTime uplink_horizon_;

    EventQueue q_;
    std::vector<Device> devices_;
    std::map<std::uint32_t, std::size_t> device_index_;
    std::vector<Gateway> gateways_;
    ns::NetworkServer ns_;
    std::map<std::uint64_t, Transmission> tx_;
    std::map<std::pair<std::uint32_t, std::uint16_t>, std::uint64_t> tx_by_fcnt16_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> tx_by_fcnt_;
    std::uint64_t next_tx_ = 1;

    std::unique_ptr<ric::PolicyStore> store_;
    std::unique_ptr<ric::NearRtRic> ric_;
    std::unique_ptr<ric::E2Agent> agent_;
    ric::RicConfig ric_cfg_;
    std::vector<KpiRecord> kpi_archive_;

    smo::Smo smo_;
    json o1_acks_ = json::array();

    std::vector<Delivered> delivered_;
    std::vector<CaptureRecord> capture_;
    std::vector<DlAir> dl_air_;
    std::vector<std::string> window_violations_;
    std::uint64_t dl_transmitted_ = 0;
    std::vector<std::string> trace_;
    std::uint64_t digest_ = 0xCBF29CE484222325ull;
};

Simulation::Simulation(const Scenario& sc, const RunOptions& opt)
    : sc_(sc), opt_(opt), seed_(opt.seed.value_or(sc.seed)), end_time_(from_seconds(sc.duration_s + sc.drain_s)),
      uplink_horizon_(from_seconds(sc.duration_s))
{
    if (opt.mode)
        sc_.mode = *opt.mode;
    if (sc_.devices.empty() || sc_.gateways.empty())
        raise(ErrorKind::Validation, "scenario needs at least one device and one gateway");

    auto gws = sc_.gateways;
    std::sort(gws.begin(), gws.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (auto& spec : gws) {
        Gateway g;
        g.mode = spec.mode.value_or(sc_.mode);
        g.ru = std::make_unique<ru::RadioUnit>(spec.id, spec.ru);
        g.du = std::make_unique<du::DistributedUnit>(spec.id, spec.du);
        g.spec = std::move(spec);
        gateways_.push_back(std::move(g));
    }

    auto ns_cfg = ns::merge(ns::default_config(), sc_.ns);
    ns_cfg.adr_enabled = sc_.adr == AdrDriver::Ns;
    ns_ = ns::NetworkServer(ns_cfg);

    for (const auto& spec : sc_.devices) {
        Device d;
        d.spec = spec;
        d.session = session_for(spec.dev_addr);
        d.sf = spec.sf;
        d.power = spec.tx_power_dbm;
        d.rng = make_rng(seed_, {1, spec.dev_addr});
        ns_.register_device(d.session);
        device_index_[spec.dev_addr] = devices_.size();
        devices_.push_back(std::move(d));
    }

    for (auto& g : gateways_) {
        smo_.register_node(smo::managed(g.spec.id, *g.ru));
        smo_.register_node(smo::managed(g.spec.id, *g.du));
    }
    smo_.register_node(smo::managed("core", ns_));
    ric_cfg_ = sc_.ric;
    if (sc_.ric_enabled())
        smo_.register_node(smo::managed("ric", ric_cfg_));

    q_.set_tracer([this](SimTime t, const std::string& label) {
        const auto line = std::to_string(t) + " " + label;
        digest_ = fnv1a(line, digest_);
        digest_ = fnv1a(std::string_view("\n"), digest_);
        if (opt_.keep_trace)
            trace_.push_back(line);
    });
}

std::size_t Simulation::gateway_index(const std::string& id) const
{
    for (std::size_t i = 0; i < gateways_.size(); ++i)
        if (gateways_[i].spec.id == id)
            return i;
    raise(ErrorKind::NotFound, "gateway '" + id + "' not in scenario");
}

// Uplinks

void Simulation::uplink_start(std::size_t di)
{
    auto& d = devices_[di];
    const SimTime now = q_.now();

    Bytes payload(d.spec.payload_octets);
    for (auto& b : payload)
        b = static_cast<std::uint8_t>(d.rng() & 0xFF);
    const auto channel = d.spec.channels[d.rng() % d.spec.channels.size()];

    mac::TxOptions o;
    o.confirmed = d.spec.confirmed;
    o.adr = sc_.adr != AdrDriver::None;
    o.fopts = d.pending_ans;
    const std::uint32_t fcnt = d.session.fcnt_up;
    const Bytes frame = mac::build_uplink(d.session, 1, payload, d.sf, o);
    d.pending_ans.clear();

    const auto p = phy::PhyParams::make(d.sf);
    const auto block = phy::phy_assemble({frame, std::nullopt}, p);
    Transmission tx;
    tx.id = next_tx_++;
    tx.dev = d.spec.dev_addr;
    tx.fcnt = fcnt;
    tx.sf = d.sf;
    tx.power = d.power;
    tx.channel = channel;
    tx.start = now;
    tx.wave = phy::modulate_frame(block, p).samples;
    tx.end = now + samples_ns(tx.wave.size(), p.bw_hz);
    tx.at.assign(gateways_.size(), Heard::Below);

    ++d.transmitted;
    d.energy_j += ric::uplink_energy_j(to_seconds(tx.end - tx.start), d.power, c_);
    d.sf_trace.push_back(d.sf);
    d.power_trace.push_back(d.power);
    d.has_uplink = true;
    d.last_end = tx.end;
    d.last_channel = channel;
    d.last_sf = d.sf;
    d.rx1_got = false;

    tx_by_fcnt16_[{tx.dev, static_cast<std::uint16_t>(fcnt & 0xFFFF)}] = tx.id;
    tx_by_fcnt_[{tx.dev, fcnt}] = tx.id;
    const auto id = tx.id;
    const SimTime end = tx.end;
    tx_.emplace(id, std::move(tx));
    q_.schedule(end, "ul-end " + mac::dev_addr_hex(d.spec.dev_addr) + " " + std::to_string(fcnt),
                [this, id] { uplink_end(id); });

    // Class A: the next uplink waits until both receive windows are over.
    const double jitter = d.spec.jitter_s > 0
                              ? std::uniform_real_distribution<double>(-d.spec.jitter_s, d.spec.jitter_s)(d.rng)
                              : 0.0;
    SimTime next = now + from_seconds(d.spec.period_s + jitter);
    next = std::max(next, end + from_seconds(c_.rx2_delay_s + 3.0));
    if (next < uplink_horizon_)
        q_.schedule(next, "ul-start " + mac::dev_addr_hex(d.spec.dev_addr), [this, di] { uplink_start(di); });
}

void Simulation::uplink_end(std::uint64_t id)
{
    auto& tx = tx_.at(id);
    for (std::size_t g = 0; g < gateways_.size(); ++g)
        tx.at[g] = receive_at(g, tx);
    tx.wave.clear();
    tx.wave.shrink_to_fit();
}

Heard Simulation::receive_at(std::size_t gi, Transmission& tx)
{
    auto& g = gateways_[gi];
    const auto& dev = devices_[device_index(tx.dev)];
    const auto& ru_cfg = g.ru->config();
    const double floor_m = sc_.channel.reference_distance_m;
    const double d_m = std::max(distance_m(dev.spec.position, g.spec.position), floor_m);
    const double rx = received_power_dbm(tx.power, d_m, sc_.channel);
    const double nf = phy::noise_floor_dbm(ru_cfg.bw_hz, ru_cfg.noise_figure_db);

    const bool on_channel = std::find(ru_cfg.channels.begin(), ru_cfg.channels.end(), tx.channel) != ru_cfg.channels.end();
    if (!on_channel || rx - nf < c_.required_snr_db(tx.sf) - c_.sensitivity_gate_db) {
        ++g.below;
        return Heard::Below;
    }

    // Collisions among transmissions overlapping this one on the same channel.
    std::vector<Reception> rxs;
    std::size_t self = 0;
    for (const auto& [oid, o] : tx_) {
        if (o.channel != tx.channel || o.end <= tx.start || o.start >= tx.end)
            continue;
        const auto& od = devices_[device_index(o.dev)];
        const double od_m = std::max(distance_m(od.spec.position, g.spec.position), floor_m);
        if (oid == tx.id)
            self = rxs.size();
        rxs.push_back({oid, o.sf, received_power_dbm(o.power, od_m, sc_.channel), o.start, o.end});
    }
    if (rxs.size() > 1 && !collision_resolve(rxs, c_)[self]) {
        ++g.collided;
        return Heard::Collided;
    }

    // Survivors are synthesized alone over thermal noise.
    const auto gw_key = fnv1a(g.spec.id);
    auto lead_rng = make_rng(seed_, {3, tx.dev, tx.fcnt, gw_key});
    const std::size_t lead = 32 + static_cast<std::size_t>(lead_rng() % 96);
    ru::RadioEvent ev;
    ev.channel_hz = tx.channel;
    ev.iq = synthesize_capture(tx.wave, static_cast<double>(ru_cfg.bw_hz), rx, nf, lead,
                               derive_seed(seed_, {4, tx.dev, tx.fcnt, gw_key}));
    ev.true_tx_power_dbm = tx.power;
    ev.arrival_time = tx.start - samples_ns(lead, ru_cfg.bw_hz);

    std::optional<du::UplinkRecord> rec;
    bool detected = false;
    if (g.mode == Mode::Modular) {
        const auto frames = g.ru->receive(ev);
        detected = !frames.empty();
        std::optional<std::vector<fronthaul::LoRaWANSection>> sections;
        for (const auto& f : frames) {
            ++g.fh_ul_frames;
            g.fh_octets += f.size();
            capture_.push_back({q_.now(), false, g.spec.id, f});
            sections = g.du->on_fronthaul(f);
        }
        if (sections)
            rec = g.du->handle_uplink(*sections);
    } else {
        const auto sections = g.ru->receive_sections(ev);
        detected = !sections.empty();
        if (detected)
            rec = g.du->handle_uplink(sections);
    }
    if (!detected) {
        ++g.below;
        return Heard::Below;
    }
    if (!rec) {
        ++g.crc_failed;
        return Heard::CrcFailed;
    }
    ++g.received;
    for (const auto& r : g.du->forward_to_ns(*rec))
        to_ns(gi, r);
    return Heard::Received;
}

void Simulation::to_ns(std::size_t g, const du::UplinkRecord& rec)
{
    // Backhaul transport: the framed record text.
    const SimTime at = q_.now() + static_cast<SimTime>(c_.gateway_internal_latency_us) * 1000 +
                       static_cast<SimTime>(c_.backhaul_latency_ms) * kNsPerMs;
    q_.schedule(at, "ns-ingest " + gateways_[g].spec.id, [this, g, text = du::frame_record(rec)] {
        for (const auto& r : du::unframe_records(text))
            ns_ingest(g, r);
    });
}

void Simulation::ns_ingest(std::size_t g, const du::UplinkRecord& rec)
{
    const auto res = ns_.ingest(rec, q_.now());
    if (res == ns::IngestResult::Opened) {
        q_.schedule(q_.now() + static_cast<SimTime>(ns_.config().dedup_window_ms) * kNsPerMs, "ns-close",
                    [this] { ns_close(); });
        return;
    }
    if (res == ns::IngestResult::Merged)
        return;
    auto it = tx_by_fcnt16_.find({rec.mac_frame.dev_addr, rec.mac_frame.fcnt});
    if (it != tx_by_fcnt16_.end()) {
        auto& tx = tx_.at(it->second);
        tx.ns_rejected = true;
        tx.at[g] = Heard::CrcFailed;
    }
}

void Simulation::ns_close()
{
    for (const auto& m : ns_.close_due(q_.now())) {
        delivered_.push_back({m.dev_addr, m.fcnt, m.payload});
        auto it = tx_by_fcnt_.find({m.dev_addr, m.fcnt});
        if (it != tx_by_fcnt_.end())
            tx_.at(it->second).delivered = true;
        auto& d = devices_[device_index(m.dev_addr)];
        ++d.delivered;

        if (agent_) {
            const auto kpi = ns_.uplink_kpi(m);
            kpi_archive_.push_back(kpi);
            for (const auto& ind : agent_->event_indications(kpi))
                to_ric(ind);
        }
        if (d.spec.downlink_every > 0 && d.delivered % static_cast<std::uint64_t>(d.spec.downlink_every) == 0) {
            ByteWriter w;
            w.u32(m.fcnt);
            ns_.enqueue_downlink(m.dev_addr, w.take(), 2);
        }
        const SimTime dl_at = m.uplink_end + from_seconds(c_.rx1_delay_s) - static_cast<SimTime>(c_.ns_dl_lead_ms) * kNsPerMs;
        q_.schedule(std::max(dl_at, q_.now()), "dl-opportunity " + mac::dev_addr_hex(m.dev_addr),
                    [this, m] { dl_opportunity(m); });
    }
}

void Simulation::dl_opportunity(const ns::MergedUplink& m)
{
    if (!ns_.has_pending(m.dev_addr))
        return;
    const auto gw = ns_.downlink_gateway(m);
    auto& g = gateways_[gateway_index(gw)];
    ns::DlOpportunity opp{m.dev_addr, gw, g.du->rx_windows(m.uplink_end, m.channel_hz, m.sf),
                          g.du->dl_tx_power_for(m.dev_addr)};
    if (opp.windows.rx2.time < q_.now())
        return;
    ns_.schedule_downlink(opp, [this](const ns::DlDispatch& d) { send_downlink(d); });
}

void Simulation::send_downlink(const ns::DlDispatch& d)
{
    const std::size_t gi = gateway_index(d.gateway_id);
    auto& g = gateways_[gi];
    if (d.params.slot < q_.now())
        raise(ErrorKind::Scheduling, "RX slot already passed");
    const auto p = phy::PhyParams::make(d.params.sf, 125000, 1, 8, false);
    const double air = phy::airtime_s(p, d.mac_frame.size());
    const auto label = "dl-air " + d.gateway_id + " " + mac::dev_addr_hex(d.dev_addr);
    if (g.mode == Mode::Modular) {
        Bytes frame = g.du->build_downlink_frame(d.mac_frame, d.params);  // DutyCycle propagates to the NS
        ++g.fh_dl_frames;
        g.fh_octets += frame.size();
        capture_.push_back({q_.now(), true, g.spec.id, frame});
        q_.schedule(d.params.slot, label, [this, gi, d, frame = std::move(frame)] {
            downlink_air(gi, d, gateways_[gi].ru->transmit(frame, q_.now()));
        });
    } else {
        auto section = g.du->build_downlink(d.mac_frame, d.params);
        q_.schedule(d.params.slot, label, [this, gi, d, section = std::move(section)] {
            downlink_air(gi, d, gateways_[gi].ru->transmit_section(section, q_.now()));
        });
    }
    dl_air_.push_back({gi, c_.channel_plan.sub_band_of(d.params.channel_hz), d.params.slot, air,
                       g.du->config().duty_cycle_limit});
}

void Simulation::downlink_air(std::size_t gi, const ns::DlDispatch& d, const ru::RadioEvent& ev)
{
    ++gateways_[gi].downlinks;
    ++dl_transmitted_;
    auto it = device_index_.find(d.dev_addr);
    if (it == device_index_.end())
        return;
    auto& dev = devices_[it->second];
    const SimTime now = q_.now();
    const auto tol = static_cast<SimTime>(phy::PhyParams::make(d.params.sf).symbol_time_s() * kNsPerSec);
    const bool rx1 = dev.has_uplink && std::llabs(now - (dev.last_end + from_seconds(c_.rx1_delay_s))) <= tol &&
                     ev.channel_hz == dev.last_channel && d.params.sf == dev.last_sf;
    const bool rx2 = dev.has_uplink && std::llabs(now - (dev.last_end + from_seconds(c_.rx2_delay_s))) <= tol &&
                     ev.channel_hz == c_.channel_plan.rx2_hz && d.params.sf == c_.channel_plan.rx2_sf;
    if (!(rx1 || (rx2 && !dev.rx1_got))) {
        window_violations_.push_back("downlink to " + mac::dev_addr_hex(d.dev_addr) + " at " + std::to_string(now) +
                                     " ns on " + std::to_string(ev.channel_hz) + " Hz outside its receive windows");
        ++dev.dl_lost;
        return;
    }
    device_receive(dev, gi, d, ev);
    if (rx1)
        dev.rx1_got = true;
}

void Simulation::device_receive(Device& dev, std::size_t gi, const ns::DlDispatch& d, const ru::RadioEvent& ev)
{
    const auto& g = gateways_[gi];
    const auto p = phy::PhyParams::make(d.params.sf, 125000, 1, 8, false);
    const double d_m = std::max(distance_m(dev.spec.position, g.spec.position), sc_.channel.reference_distance_m);
    const double rx = received_power_dbm(ev.true_tx_power_dbm, d_m, sc_.channel);
    const double nf = phy::noise_floor_dbm(p.bw_hz, sc_.channel.noise_figure_db);
    if (rx - nf < c_.required_snr_db(p.sf) - c_.sensitivity_gate_db) {
        ++dev.dl_lost;
        return;
    }
    const float inv = static_cast<float>(std::pow(10.0, -ev.true_tx_power_dbm / 20.0));
    std::vector<phy::Sample> unit(ev.iq.samples.size());
    std::transform(ev.iq.samples.begin(), ev.iq.samples.end(), unit.begin(), [inv](phy::Sample s) { return s * inv; });
    const auto capture = synthesize_capture(unit, ev.iq.sample_rate_hz, rx, nf, 48,
                                            derive_seed(seed_, {5, dev.spec.dev_addr, d.fcnt_down}));
    const auto cap = phy::receive_frame(capture.samples, p, ru::kSearchLimit);
    if (!cap.detection.sfd_found) {
        ++dev.dl_lost;
        return;
    }
    std::vector<std::uint16_t> sym;
    sym.reserve(cap.symbols.size());
    for (const auto& r : cap.symbols)
        sym.push_back(r.symbol);
    mac::Verified v;
    try {
        const auto rec = phy::phy_recover(sym, p);
        if (rec.crc_on && !rec.crc_ok)
            raise(ErrorKind::Integrity, "payload crc");
        v = mac::parse_and_verify(rec.payload.bytes, dev.session);
    } catch (const Error&) {
        ++dev.dl_lost;
        return;
    }
    if (!v.mic_ok || !v.fcnt_ok || v.frame.dev_addr != dev.spec.dev_addr) {
        ++dev.dl_lost;
        return;
    }
    mac::accept_frame(dev.session, v);
    ++dev.dl_received;
    if (v.frame.fctrl.ack)
        ++dev.acks;
    if (v.frame.fport && *v.frame.fport > 0 && !v.frame.frm_payload.empty())
        ++dev.app_downlinks;
    for (const auto& req : mac::decode_downlink_commands(v.frame.fopts)) {
        dev.sf = req.sf;
        dev.power = req.tx_power_dbm;
        dev.pending_ans = mac::encode_link_adr_ans(true, true, true);
        ++dev.adr_applied;
    }
}

// RIC

void Simulation::setup_ric()
{
    store_ = std::make_unique<ric::PolicyStore>();
    ric_ = std::make_unique<ric::NearRtRic>(store_.get(), c_);
    agent_ = std::make_unique<ric::E2Agent>(
        "ns", [this](SimTime t) { return ns_.report(t); },
        [this](const std::string& path, const json& value) { ns_.apply_control(path, value); });
    ric_->connect_node("ns");
    ric_->add_xapp(std::make_unique<GatedXApp>(std::make_unique<ric::SfAdjustmentXApp>("ns"), &ric_cfg_.sf_adjustment));
    ric_->add_xapp(
        std::make_unique<GatedXApp>(std::make_unique<ric::GatewaySteeringXApp>("ns"), &ric_cfg_.gateway_steering));
    ric_->add_xapp(
        std::make_unique<GatedXApp>(std::make_unique<ric::EnergyForecastXApp>("ns"), &ric_cfg_.energy_analysis));
    // E2 setup and event-driven subscriptions, completed before traffic starts.
    for (const auto* id : {"sf-adjustment", "gateway-steering", "energy-forecast"}) {
        const auto req = ric_->subscribe(id, "ns", 0);
        const auto resp = agent_->handle(ric::decode_e2(ric::encode_e2(req)), 0);
        ric_->on_message(ric::decode_e2(ric::encode_e2(*resp)), 0);
    }
    for (const auto& p : sc_.policies)
        q_.schedule(from_seconds(p.at_s), "a1-put " + p.id, [this, p] { store_->put(p.type, p.id, p.body); });
    ric_->tick(0);
    q_.schedule(ric_->next_tick(0), "ric-tick", [this] { ric_tick(); });
}

void Simulation::to_ric(const ric::E2Message& msg)
{
    const SimTime link = static_cast<SimTime>(c_.e2_link_latency_ms) * kNsPerMs;
    q_.schedule(q_.now() + link, "e2-to-ric", [this, bytes = ric::encode_e2(msg), link] {
        for (const auto& out : ric_->on_message(ric::decode_e2(bytes), q_.now()))
            q_.schedule(out.send_at + link, "e2-to-ns", [this, req = ric::encode_e2(out.msg)] {
                if (auto resp = agent_->handle(ric::decode_e2(req), q_.now()))
                    to_ric(*resp);
            });
    });
}

void Simulation::ric_tick()
{
    ric_->tick(q_.now());
    const SimTime next = ric_->next_tick(q_.now());
    if (next <= end_time_)
        q_.schedule(next, "ric-tick", [this] { ric_tick(); });
}

// Run, report, audit

SimResult Simulation::run()
{
    if (sc_.ric_enabled())
        setup_ric();
    for (const auto& push : sc_.o1)
        q_.schedule(from_seconds(push.at_s), "o1-push", [this, push] {
            json rec{{"time_ns", q_.now()}};
            try {
                rec["ack"] = smo::to_json(smo_.apply(push.document, q_.now()));
            } catch (const Error& e) {
                rec["rejected"] = e.what();
            }
            o1_acks_.push_back(std::move(rec));
        });
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        auto& d = devices_[i];
        const double start = d.spec.start_s ? *d.spec.start_s
                                            : std::uniform_real_distribution<double>(0.0, d.spec.period_s)(d.rng);
        if (from_seconds(start) < uplink_horizon_)
            q_.schedule(from_seconds(start), "ul-start " + mac::dev_addr_hex(d.spec.dev_addr),
                        [this, i] { uplink_start(i); });
    }
    q_.run_until(end_time_);

    SimResult r;
    std::sort(delivered_.begin(), delivered_.end());
    r.delivered = delivered_;
    r.report = build_report();
    r.audit_failures = audit(r.report);
    r.report["audits"]["failures"] = r.audit_failures;
    r.report["audits"]["ok"] = r.audit_failures.empty();
    r.capture = std::move(capture_);
    r.trace = std::move(trace_);
    r.trace_digest = digest_;
    r.report["trace"] = {{"events", q_.executed()}, {"digest", mac::dev_addr_hex(static_cast<std::uint32_t>(digest_ >> 32)) +
                                                                  mac::dev_addr_hex(static_cast<std::uint32_t>(digest_))}};
    return r;
}

json Simulation::build_report()
{
    std::map<std::string, std::uint64_t> buckets{
        {"delivered", 0}, {"collided", 0}, {"below_sensitivity", 0}, {"crc_failed", 0}};
    std::map<std::uint32_t, std::map<std::string, std::uint64_t>> per_dev;
    std::map<int, std::map<std::string, std::uint64_t>> per_sf;
    for (const auto& [id, tx] : tx_) {
        Heard h = Heard::Below;
        if (tx.delivered)
            h = Heard::Received;
        else if (tx.ns_rejected || std::count(tx.at.begin(), tx.at.end(), Heard::CrcFailed) ||
                 std::count(tx.at.begin(), tx.at.end(), Heard::Received))
            h = Heard::CrcFailed;  // heard but never accepted
        else if (std::count(tx.at.begin(), tx.at.end(), Heard::Collided))
            h = Heard::Collided;
        ++buckets[bucket_name(h)];
        ++per_dev[tx.dev][bucket_name(h)];
        ++per_sf[tx.sf][bucket_name(h)];
        ++per_sf[tx.sf]["transmitted"];
    }

    json report;
    report["scenario"] = sc_.name;
    report["mode"] = to_string(sc_.mode);
    report["seed"] = seed_;
    report["duration_s"] = sc_.duration_s;
    report["adr"] = to_string(sc_.adr);
    json up = json::object();
    up["transmitted"] = tx_.size();
    for (const auto& [k, v] : buckets)
        up[k] = v;
    report["uplinks"] = up;
    json by_sf = json::object();
    for (const auto& [sf, b] : per_sf)
        by_sf[std::to_string(sf)] = {{"transmitted", b.count("transmitted") ? b.at("transmitted") : 0},
                                     {"delivered", b.count("delivered") ? b.at("delivered") : 0}};
    report["uplinks_by_sf"] = by_sf;
    report["pdr"] = tx_.empty() ? 0.0 : static_cast<double>(buckets["delivered"]) / static_cast<double>(tx_.size());

    json devs = json::array();
    for (const auto& d : devices_) {
        auto& b = per_dev[d.spec.dev_addr];
        devs.push_back({{"dev_addr", mac::dev_addr_hex(d.spec.dev_addr)},
                        {"transmitted", d.transmitted},
                        {"delivered", d.delivered},
                        {"collided", b["collided"]},
                        {"below_sensitivity", b["below_sensitivity"]},
                        {"crc_failed", b["crc_failed"]},
                        {"pdr", d.transmitted ? static_cast<double>(d.delivered) / static_cast<double>(d.transmitted) : 0.0},
                        {"energy_j", d.energy_j},
                        {"initial_sf", d.spec.sf},
                        {"final_sf", d.sf},
                        {"final_tx_power_dbm", d.power},
                        {"downlinks_received", d.dl_received},
                        {"downlinks_lost", d.dl_lost},
                        {"acks", d.acks},
                        {"app_downlinks", d.app_downlinks},
                        {"adr_commands_applied", d.adr_applied},
                        {"sf_trace", d.sf_trace},
                        {"tx_power_trace", d.power_trace}});
    }
    report["devices"] = devs;

    json gws = json::array();
    const SimTime now = q_.now();
    for (const auto& g : gateways_) {
        json duty = json::object();
        for (std::size_t b = 0; b < c_.channel_plan.sub_bands.size(); ++b)
            duty[c_.channel_plan.sub_bands[b].name] = g.du->duty().used_s(b, now);
        gws.push_back({{"id", g.spec.id},
                       {"mode", to_string(g.mode)},
                       {"received", g.received},
                       {"collided", g.collided},
                       {"below_sensitivity", g.below},
                       {"crc_failed", g.crc_failed},
                       {"downlinks", g.downlinks},
                       {"duty_used_s", duty},
                       {"fronthaul", {{"ul_frames", g.fh_ul_frames}, {"dl_frames", g.fh_dl_frames}, {"octets", g.fh_octets}}}});
    }
    report["gateways"] = gws;

    const auto nsk = ns_.report(now);
    report["ns"] = nsk.metrics;
    report["dedup_ratio"] = nsk.metrics.at("dedup_ratio");
    std::uint64_t dl_rx = 0;
    for (const auto& d : devices_)
        dl_rx += d.dl_received;
    report["downlinks"] = {{"transmitted", dl_transmitted_},
                           {"received", dl_rx},
                           {"success", dl_transmitted_ ? static_cast<double>(dl_rx) / static_cast<double>(dl_transmitted_) : 0.0},
                           {"deferred", nsk.metrics.at("dl_deferred")}};

    std::uint64_t fh_ul = 0, fh_dl = 0;
    for (const auto& g : gateways_) {
        fh_ul += g.fh_ul_frames;
        fh_dl += g.fh_dl_frames;
    }
    report["fronthaul_frames"] = {{"ul", fh_ul}, {"dl", fh_dl}};

    json ric = {{"enabled", static_cast<bool>(ric_)}};
    if (ric_) {
        json log = json::array();
        for (const auto& e : ric_->control_log())
            log.push_back({{"txn", e.transaction_id},
                           {"xapp", e.xapp_id},
                           {"target", e.command.target},
                           {"path", e.command.path},
                           {"value", e.command.value},
                           {"indication_ns", e.indication_time},
                           {"issued_ns", e.issued_at},
                           {"applied_ns", e.applied_at ? json(*e.applied_at) : json()},
                           {"acked", e.acked ? json(*e.acked) : json()}});
        ric["commands"] = log;
        ric["config"] = ric::to_json(ric_cfg_);
        ric["policies"] = store_->to_json();
        if (auto rapp = ric::rapp_energy_efficiency(kpi_archive_, c_)) {
            json by_sf = json::object();
            for (const auto& [sf, e] : rapp->energy_by_sf)
                by_sf[std::to_string(sf)] = e;
            ric["rapp"] = {{"total_energy_j", rapp->total_energy_j},
                           {"energy_by_sf", by_sf},
                           {"high_sf_share", rapp->high_sf_share},
                           {"draft", rapp->draft ? ric::to_json(*rapp->draft) : json()}};
        }
    }
    report["ric"] = ric;

    const auto snap = smo_.collect_kpis(0, std::max<SimTime>(now, 1));
    report["o1"] = {{"acks", o1_acks_}, {"kpis", smo::to_json(snap)}};

    json delivered = json::array();
    for (const auto& d : delivered_)
        delivered.push_back({{"dev_addr", mac::dev_addr_hex(d.dev_addr)}, {"fcnt", d.fcnt}, {"payload", to_hex(d.payload)}});
    report["delivered"] = delivered;
    return report;
}

std::vector<std::string> Simulation::audit(json& report)
{
    std::vector<std::string> bad;
    json audits = json::object();

    // Conservation: every transmission lands in exactly one bucket, and the delivered
    // bucket matches what the AS received.
    const auto& up = report["uplinks"];
    const auto sum = up["delivered"].get<std::uint64_t>() + up["collided"].get<std::uint64_t>() +
                     up["below_sensitivity"].get<std::uint64_t>() + up["crc_failed"].get<std::uint64_t>();
    bool conserved = sum == up["transmitted"].get<std::uint64_t>();
    if (!conserved)
        bad.push_back("conservation: transmitted " + up["transmitted"].dump() + " != bucket sum " + std::to_string(sum));
    if (up["delivered"].get<std::uint64_t>() != ns_.as_log().size()) {
        conserved = false;
        bad.push_back("conservation: delivered " + up["delivered"].dump() + " != AS records " +
                      std::to_string(ns_.as_log().size()));
    }
    std::uint64_t copies = 0;
    for (const auto& g : gateways_)
        copies += g.received;
    std::uint64_t queued = 0;
    for (const auto& g : gateways_)
        queued += g.du->retry_queue_depth();
    if (static_cast<double>(copies - queued) != report["ns"]["copies"].get<double>()) {
        conserved = false;
        bad.push_back("conservation: gateway records " + std::to_string(copies) + " != NS copies " +
                      report["ns"]["copies"].dump());
    }
    audits["conservation"] = conserved;

    // Duty cycle, recomputed from the transmissions actually put on air.
    bool duty_ok = true;
    const SimTime window = from_seconds(c_.duty_cycle_window_s);
    for (std::size_t i = 0; i < dl_air_.size(); ++i) {
        const auto& a = dl_air_[i];
        if (!a.band)
            continue;
        double used = 0;
        for (const auto& b : dl_air_)
            if (b.gw == a.gw && b.band == a.band && b.start <= a.start && b.start > a.start - window)
                used += b.airtime_s;
        if (used > a.limit * c_.duty_cycle_window_s + 1e-9) {
            duty_ok = false;
            bad.push_back("duty cycle: gateway " + gateways_[a.gw].spec.id + " used " + std::to_string(used) +
                          " s in the window ending " + std::to_string(a.start) + " ns");
        }
    }
    audits["duty_cycle"] = duty_ok;

    audits["rx_windows"] = window_violations_.empty();
    for (const auto& v : window_violations_)
        bad.push_back("rx windows: " + v);

    bool latency_ok = true;
    if (ric_)
        for (const auto& v : ric_->audit_latency()) {
            latency_ok = false;
            bad.push_back("near-RT latency: " + v);
        }
    audits["latency"] = latency_ok;
    report["audits"] = audits;
    return bad;
}

}  // namespace

SimResult run_scenario(const Scenario& sc, const RunOptions& opt)
{
    Simulation sim(sc, opt);
    return sim.run();
}

}  // namespace olrw::netsim
