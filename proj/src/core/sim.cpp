#include "core/sim.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <queue>
#include <utility>
#include <variant>

#include "core/aodv_node.hpp"
#include "core/errors.hpp"
#include "core/monitor_hub.hpp"
#include "core/rng.hpp"
#include "core/trace.hpp"

namespace meshdetect {

namespace {

enum class EventKind : uint8_t {
    DetectionTick,
    SimEnd,
    SessionArrival,
    SessionCheck,
    Delivery,
    Observe,
};

struct Event {
    TimeUs t = 0;
    uint64_t seq = 0;
    EventKind kind = EventKind::SimEnd;
    uint32_t session = 0;     // SessionCheck
    NodeId receiver = kNoNode;// Delivery
    bool is_rreq = true;      // Delivery payload selector
    RreqPacket rreq;
    RrepPacket rrep;
    TxObservation obs;        // Observe
};

struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

struct Session {
    NodeId src = kNoNode;
    NodeId dest = kNoNode;
    TimeUs end = 0;
    bool active = true;
};

DetectorParams detector_params(const ScenarioConfig& cfg) {
    DetectorParams p;
    p.alpha = cfg.alpha;
    p.beta = cfg.beta;
    p.min_row_total = cfg.min_row_total;
    return p;
}

MonitorHub::Params hub_params(const ScenarioConfig& cfg) {
    MonitorHub::Params p;
    p.window_us = cfg.window_us();
    p.ring_windows = cfg.windows_per_detection();
    p.rreq_timeout_us = cfg.rreq_timeout_us();
    p.rrep_timeout_us = cfg.rrep_timeout_us();
    return p;
}

// Selects floor(fraction * n) distinct node ids by a partial shuffle.
std::vector<NodeId> pick_selfish(uint32_t n, double fraction, Rng& rng) {
    const uint32_t count = static_cast<uint32_t>(fraction * n);
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t j = i + static_cast<uint32_t>(rng.uniform_int(n - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
    return ids;
}

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, std::ostream* trace_out)
        : cfg_(cfg),
          placement_(Rng::substream(cfg.seed, "placement")),
          traffic_(Rng::substream(cfg.seed, "traffic")),
          behavior_(Rng::substream(cfg.seed, "behavior")),
          channel_(Rng::substream(cfg.seed, "channel")),
          topo_(build_topology(cfg, placement_)),
          hub_(topo_, hub_params(cfg)),
          duration_(cfg.duration_us()) {
        if (trace_out) writer_.emplace(*trace_out);
        selfish_ = pick_selfish(cfg.node_count, cfg.selfish_fraction, behavior_);

        const NodeBehavior selfish_behavior = cfg.strategy == SelfishStrategy::DropReq
                                                  ? NodeBehavior::SelfishDropReq
                                                  : NodeBehavior::SelfishDropRep;
        nodes_.reserve(cfg.node_count);
        for (NodeId v = 0; v < cfg.node_count; ++v) {
            const bool s = std::binary_search(selfish_.begin(), selfish_.end(), v);
            nodes_.emplace_back(v, s ? selfish_behavior : NodeBehavior::Honest, cfg.drop_prob);
        }
    }

    SimResult run() {
        if (writer_) writer_->write_header(cfg_, topo_, selfish_);

        for (TimeUs tick = cfg_.detection_us(); tick < duration_; tick += cfg_.window_us())
            push_tick(tick);
        push_sim_end(duration_);
        push_arrival(seconds_to_us(traffic_.exponential(1.0 / cfg_.session_arrival_rate)));

        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            if (ev.kind == EventKind::SimEnd) break;
            dispatch(ev);
        }

        SimResult result;
        result.config = cfg_;
        result.positions = topo_.positions();
        result.selfish = selfish_;
        result.snapshots = std::move(snapshots_);
        result.metrics = metrics_json(cfg_, selfish_, result.snapshots);
        return result;
    }

private:
    void dispatch(Event& ev) {
        switch (ev.kind) {
            case EventKind::DetectionTick: on_tick(ev.t); break;
            case EventKind::SessionArrival: on_arrival(ev.t); break;
            case EventKind::SessionCheck: on_check(ev.t, ev.session); break;
            case EventKind::Delivery: on_delivery(ev); break;
            case EventKind::Observe: hub_.observe(ev.obs); break;
            case EventKind::SimEnd: break;
        }
    }

    void on_tick(TimeUs t) {
        hub_.advance(t);
        snapshots_.push_back(snapshot_detection(hub_, cfg_.node_count, detector_params(cfg_), t));
    }

    void on_arrival(TimeUs t) {
        const NodeId src = static_cast<NodeId>(traffic_.uniform_int(cfg_.node_count));
        NodeId dest = static_cast<NodeId>(traffic_.uniform_int(cfg_.node_count - 1));
        if (dest >= src) ++dest;
        const TimeUs length = seconds_to_us(traffic_.exponential(cfg_.mean_session_duration));
        sessions_.push_back({src, dest, t + length, true});
        push_check(t, static_cast<uint32_t>(sessions_.size() - 1));

        const TimeUs gap = seconds_to_us(traffic_.exponential(1.0 / cfg_.session_arrival_rate));
        push_arrival(t + gap);
    }

    void on_check(TimeUs t, uint32_t index) {
        Session& s = sessions_[index];
        if (!s.active) return;
        if (t >= s.end) {
            s.active = false;
            return;
        }
        if (!nodes_[s.src].valid_route(s.dest, t)) {
            RreqPacket pkt =
                nodes_[s.src].originate_rreq(s.dest, t, cfg_.initial_ttl, cfg_.rrep_timeout_us());
            transmit_rreq(s.src, pkt, t);
        }
        push_check(t + cfg_.rrep_timeout_us(), index);
    }

    void on_delivery(Event& ev) {
        const TimeUs t = ev.t;
        if (ev.is_rreq) {
            NodeAction action = nodes_[ev.receiver].handle_rreq(
                ev.rreq, t, cfg_.rrep_timeout_us(), cfg_.route_lifetime_us(), behavior_);
            if (auto* rb = std::get_if<ActionRebroadcast>(&action)) {
                transmit_rreq(ev.receiver, rb->packet, t);
            } else if (auto* rep = std::get_if<ActionSendRrep>(&action)) {
                transmit_rrep(ev.receiver, rep->packet, t);
            } else if (auto* drop = std::get_if<ActionDrop>(&action)) {
                if (writer_)
                    writer_->write_drop(t, ev.receiver, drop->reason, true, ev.rreq.src_id,
                                        ev.rreq.dest_id, ev.rreq.bcast_id);
            }
        } else {
            NodeAction action =
                nodes_[ev.receiver].handle_rrep(ev.rrep, t, cfg_.route_lifetime_us(), behavior_);
            if (auto* fwd = std::get_if<ActionForwardRrep>(&action)) {
                transmit_rrep(ev.receiver, fwd->packet, t);
            } else if (auto* drop = std::get_if<ActionDrop>(&action)) {
                if (writer_)
                    writer_->write_drop(t, ev.receiver, drop->reason, false, ev.rrep.src_id,
                                        ev.rrep.dest_id, 0);
            }
        }
    }

    TimeUs draw_latency() {
        const double lo = cfg_.per_hop_latency - cfg_.latency_jitter;
        const double hi = cfg_.per_hop_latency + cfg_.latency_jitter;
        return seconds_to_us(channel_.uniform(lo, hi));
    }

    void transmit_rreq(NodeId sender, const RreqPacket& pkt, TimeUs t) {
        TxObservation obs;
        obs.tx_time = t;
        obs.latency = draw_latency();
        obs.is_rreq = true;
        obs.rreq = pkt;
        const std::vector<NodeId>& targets = topo_.neighbors(sender);
        if (cfg_.channel_loss_prob > 0.0) {
            for (NodeId q : targets)
                if (channel_.bernoulli(cfg_.channel_loss_prob)) obs.lost.push_back(q);
        }
        if (writer_) writer_->write_tx(obs);
        const TimeUs at = t + obs.latency;
        for (NodeId q : targets) {
            if (std::binary_search(obs.lost.begin(), obs.lost.end(), q)) continue;
            Event ev;
            ev.t = at;
            ev.kind = EventKind::Delivery;
            ev.receiver = q;
            ev.is_rreq = true;
            ev.rreq = pkt;
            push(std::move(ev));
        }
        push_observe(at, std::move(obs));
    }

    void transmit_rrep(NodeId sender, const RrepPacket& pkt, TimeUs t) {
        TxObservation obs;
        obs.tx_time = t;
        obs.latency = draw_latency();
        obs.is_rreq = false;
        obs.rrep = pkt;
        const bool lost = cfg_.channel_loss_prob > 0.0 &&
                          topo_.adjacent(sender, pkt.receiver) &&
                          channel_.bernoulli(cfg_.channel_loss_prob);
        if (lost) obs.lost.push_back(pkt.receiver);
        if (writer_) writer_->write_tx(obs);
        const TimeUs at = t + obs.latency;
        if (!lost && topo_.adjacent(sender, pkt.receiver)) {
            Event ev;
            ev.t = at;
            ev.kind = EventKind::Delivery;
            ev.receiver = pkt.receiver;
            ev.is_rreq = false;
            ev.rrep = pkt;
            push(std::move(ev));
        }
        push_observe(at, std::move(obs));
    }

    void push(Event ev) {
        ev.seq = seq_++;
        queue_.push(std::move(ev));
    }

    void push_tick(TimeUs t) {
        Event ev;
        ev.t = t;
        ev.kind = EventKind::DetectionTick;
        push(std::move(ev));
    }

    void push_sim_end(TimeUs t) {
        Event ev;
        ev.t = t;
        ev.kind = EventKind::SimEnd;
        push(std::move(ev));
    }

    void push_arrival(TimeUs t) {
        if (t >= duration_) return;
        Event ev;
        ev.t = t;
        ev.kind = EventKind::SessionArrival;
        push(std::move(ev));
    }

    void push_check(TimeUs t, uint32_t index) {
        if (t >= duration_) return;
        Event ev;
        ev.t = t;
        ev.kind = EventKind::SessionCheck;
        ev.session = index;
        push(std::move(ev));
    }

    void push_observe(TimeUs t, TxObservation obs) {
        Event ev;
        ev.t = t;
        ev.kind = EventKind::Observe;
        ev.obs = std::move(obs);
        push(std::move(ev));
    }

    ScenarioConfig cfg_;
    Rng placement_;
    Rng traffic_;
    Rng behavior_;
    Rng channel_;
    Topology topo_;
    MonitorHub hub_;
    TimeUs duration_;
    std::optional<TraceWriter> writer_;
    std::vector<NodeId> selfish_;
    std::vector<NodeState> nodes_;
    std::vector<Session> sessions_;
    std::vector<DetectionSnapshot> snapshots_;
    std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
    uint64_t seq_ = 0;
};

} // namespace

SimResult run_simulation(const ScenarioConfig& cfg, std::ostream* trace_out) {
    cfg.validate();
    Simulation sim(cfg, trace_out);
    return sim.run();
}

SimResult replay_trace(std::istream& trace_in) {
    TraceReader reader(trace_in);
    TraceHeader header = reader.read_header();
    header.config.validate();
    if (header.positions.size() != header.config.node_count)
        throw TraceCorrupt("header position count does not match node_count");

    Topology topo = Topology::from_positions(header.positions, header.config.radio_range, false);
    MonitorHub hub(topo, hub_params(header.config));

    std::vector<TxObservation> records;
    while (auto rec = reader.next()) records.push_back(std::move(*rec));
    std::stable_sort(records.begin(), records.end(),
                     [](const TxObservation& a, const TxObservation& b) {
                         return a.tx_time + a.latency < b.tx_time + b.latency;
                     });

    const ScenarioConfig& cfg = header.config;
    const TimeUs duration = cfg.duration_us();
    const DetectorParams params = detector_params(cfg);
    std::vector<DetectionSnapshot> snapshots;

    TimeUs tick = cfg.detection_us();
    auto run_ticks_through = [&](TimeUs t) {
        while (tick < duration && tick <= t) {
            hub.advance(tick);
            snapshots.push_back(snapshot_detection(hub, cfg.node_count, params, tick));
            tick += cfg.window_us();
        }
    };

    for (const TxObservation& rec : records) {
        const TimeUs t_obs = rec.tx_time + rec.latency;
        if (t_obs >= duration) break;
        run_ticks_through(t_obs);
        hub.observe(rec);
    }
    run_ticks_through(duration - 1);

    SimResult result;
    result.config = cfg;
    result.positions = topo.positions();
    result.selfish = header.selfish;
    result.snapshots = std::move(snapshots);
    result.metrics = metrics_json(cfg, result.selfish, result.snapshots);
    return result;
}

} // namespace meshdetect
