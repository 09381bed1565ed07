#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "core/fsm.hpp"
#include "core/packet.hpp"
#include "core/timebase.hpp"
#include "core/topology.hpp"

namespace meshdetect {

// One transmission as monitors perceive it: emitted at tx_time, delivered to
// every in-range node at tx_time + latency, except the ids in `lost` (sorted),
// whose channel draw failed. This is exactly what the trace stores, so replay
// feeds the hub the same inputs as a live run.
struct TxObservation {
    TimeUs tx_time = 0;
    TimeUs latency = 0;
    bool is_rreq = true;
    RreqPacket rreq;
    RrepPacket rrep;
    std::vector<NodeId> lost;
};

// 8x8 transition count matrix, row = from-state, column = to-state (1-based
// states stored at index state-1).
using TransitionMatrix = std::array<uint32_t, kFsmStateCount * kFsmStateCount>;

inline uint32_t matrix_at(const TransitionMatrix& m, FsmState from, FsmState to) {
    return m[(static_cast<int>(from) - 1) * kFsmStateCount + (static_cast<int>(to) - 1)];
}

// Per-window forwarding-obligation counters for one monitored neighbor.
struct LedgerCounts {
    uint32_t obl_req = 0;
    uint32_t obl_rep = 0;
    uint32_t ful_req = 0;
    uint32_t ful_rep = 0;
    uint32_t viol_req = 0;
    uint32_t viol_rep = 0;

    uint32_t obligations_total() const { return obl_req + obl_rep; }
    uint32_t violations_total() const { return viol_req + viol_rep; }

    LedgerCounts& operator+=(const LedgerCounts& o) {
        obl_req += o.obl_req;
        obl_rep += o.obl_rep;
        ful_req += o.ful_req;
        ful_rep += o.ful_rep;
        viol_req += o.viol_req;
        viol_rep += o.viol_rep;
        return *this;
    }
};

struct LoggedTransition {
    NodeId monitor;
    NodeId monitored;
    FsmState from;
    FsmState to;
    TimeUs at;
};

// Promiscuous monitoring state for every node at once: per-(monitor, neighbor,
// flood) state machines, windowed transition matrices, and the forwarding-
// obligation ledger. Deadlines and window rollovers run off an internal heap;
// callers advance time monotonically via observe()/advance().
class MonitorHub {
public:
    struct Params {
        TimeUs window_us = 0;
        uint32_t ring_windows = 1; // windows per detection span (D / W)
        TimeUs rreq_timeout_us = 0;
        TimeUs rrep_timeout_us = 0;
    };

    MonitorHub(const Topology& topo, const Params& params, bool log_transitions = false);

    // Feeds one transmission to every monitor that can hear it. Observations
    // must arrive in nondecreasing delivery-time order.
    void observe(const TxObservation& obs);

    // Fires deadlines and window rollovers due at or before t.
    void advance(TimeUs t);

    const std::vector<NodeId>& monitored_of(NodeId monitor) const;

    // Element-wise sum of the closed windows currently in the ring. Throws
    // UnknownNode if `neighbor` is not monitored by `monitor`.
    TransitionMatrix aggregate(NodeId monitor, NodeId neighbor) const;
    LedgerCounts ledger_aggregate(NodeId monitor, NodeId neighbor) const;
    LedgerCounts ledger_lifetime(NodeId monitor, NodeId neighbor) const;

    // Live (unclosed) window counts, used by tests.
    TransitionMatrix current_window(NodeId monitor, NodeId neighbor) const;

    uint32_t closed_windows() const { return total_closed_; }
    const std::vector<LoggedTransition>& transition_log() const { return log_; }

    std::optional<FsmState> fsm_state(NodeId monitor, NodeId src, NodeId dest, uint32_t bcast,
                                      NodeId monitored) const;

private:
    enum DeadlineKind : uint8_t { kFsmReq, kFsmRep, kObReq, kObRep };
    enum ObStatus : uint8_t { kObNone = 0, kObPending, kObFulfilled, kObViolated };

    struct ObState {
        ObStatus status = kObNone;
        NodeId expected = kNoNode;
    };

    struct LmuCell {
        NodeId monitored = kNoNode;
        FsmState state = FsmState::Init;
        uint32_t req_gen = 0;
        uint32_t rep_gen = 0;
        ObState ob_req;
        ObState ob_rep;
        bool satisfied_req = false;      // duty already seen done (rebroadcast or reply)
        std::vector<NodeId> rep_sent_to; // receivers of observed RREP transmissions
    };

    struct LmuState {
        std::vector<LmuCell> cells; // keyed by monitored id, sorted
        TimeUs last_touch = 0;
    };

    struct MonitorState {
        std::vector<NodeId> monitored;
        std::vector<int32_t> slot_of;                   // node id -> slot or -1
        std::vector<TransitionMatrix> current;          // per slot
        std::vector<std::vector<TransitionMatrix>> ring;// [window][slot]
        std::vector<LedgerCounts> ledger_current;
        std::vector<std::vector<LedgerCounts>> ledger_ring;
        std::vector<LedgerCounts> ledger_lifetime;
        uint32_t ring_start = 0;
        uint32_t ring_count = 0;
        std::unordered_map<uint64_t, LmuState> lmus;    // flood key -> state
    };

    struct Deadline {
        TimeUs fire;
        uint64_t seq;
        NodeId monitor;
        uint64_t flood_key;
        NodeId monitored;
        DeadlineKind kind;
        uint32_t gen;
    };
    struct DeadlineLater {
        bool operator()(const Deadline& a, const Deadline& b) const {
            if (a.fire != b.fire) return a.fire > b.fire;
            return a.seq > b.seq;
        }
    };

    static uint64_t flood_key(NodeId src, NodeId dest, uint32_t bcast);

    void process_for_monitor(MonitorState& mon, NodeId monitor, const TxObservation& obs,
                             TimeUs t_obs);
    LmuCell& cell_for(LmuState& lmu, NodeId monitored);
    LmuState& activate_flood(MonitorState& mon, NodeId src, NodeId dest, uint32_t bcast,
                             uint64_t& key_out);
    void apply_fsm_event(MonitorState& mon, NodeId monitor, uint64_t key, LmuCell& cell,
                         FsmEvent ev, TimeUs t_obs);
    void record(MonitorState& mon, NodeId monitor, NodeId monitored, FsmState from, FsmState to,
                TimeUs at);
    void create_req_obligation(MonitorState& mon, NodeId monitor, uint64_t key, LmuCell& cell,
                               TimeUs t_obs);
    void create_rep_obligation(MonitorState& mon, NodeId monitor, uint64_t key, LmuCell& cell,
                               NodeId expected, TimeUs t_obs);
    void fulfill_req(MonitorState& mon, LmuCell& cell);
    void fulfill_rep_on_transmit(MonitorState& mon, LmuCell& cell, NodeId receiver);
    void fire_deadline(const Deadline& d);
    void rollover();
    void prune(TimeUs now);

    const Topology& topo_;
    Params params_;
    bool log_enabled_;
    std::vector<MonitorState> monitors_;
    std::priority_queue<Deadline, std::vector<Deadline>, DeadlineLater> deadlines_;
    uint64_t deadline_seq_ = 0;
    uint32_t gen_counter_ = 0;
    TimeUs next_boundary_;
    TimeUs last_time_ = 0;
    uint32_t total_closed_ = 0;
    std::vector<LoggedTransition> log_;
};

} // namespace meshdetect
