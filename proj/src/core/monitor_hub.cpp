#include "core/monitor_hub.hpp"

#include <algorithm>

#include "core/errors.hpp"

namespace meshdetect {

namespace {

TransitionMatrix zero_matrix() {
    TransitionMatrix m;
    m.fill(0);
    return m;
}

bool in_sorted(const std::vector<NodeId>& v, NodeId x) {
    return std::binary_search(v.begin(), v.end(), x);
}

} // namespace

uint64_t MonitorHub::flood_key(NodeId src, NodeId dest, uint32_t bcast) {
    return (static_cast<uint64_t>(src) << 48) | (static_cast<uint64_t>(dest) << 32) |
           static_cast<uint64_t>(bcast);
}

MonitorHub::MonitorHub(const Topology& topo, const Params& params, bool log_transitions)
    : topo_(topo), params_(params), log_enabled_(log_transitions),
      next_boundary_(params.window_us) {
    const size_t n = topo_.node_count();
    monitors_.resize(n);
    for (size_t m = 0; m < n; ++m) {
        MonitorState& mon = monitors_[m];
        mon.monitored = topo_.neighbors(static_cast<NodeId>(m));
        mon.slot_of.assign(n, -1);
        for (size_t i = 0; i < mon.monitored.size(); ++i) {
            mon.slot_of[mon.monitored[i]] = static_cast<int32_t>(i);
        }
        mon.current.assign(mon.monitored.size(), zero_matrix());
        mon.ledger_current.assign(mon.monitored.size(), LedgerCounts{});
        mon.ledger_lifetime.assign(mon.monitored.size(), LedgerCounts{});
    }
}

void MonitorHub::observe(const TxObservation& obs) {
    const TimeUs t_obs = obs.tx_time + obs.latency;
    advance(t_obs);
    const NodeId sender = obs.is_rreq ? obs.rreq.sender : obs.rrep.sender;
    const size_t n = monitors_.size();
    for (size_t m = 0; m < n; ++m) {
        const NodeId mid = static_cast<NodeId>(m);
        if (mid != sender) {
            if (!topo_.adjacent(mid, sender)) continue;
            if (in_sorted(obs.lost, mid)) continue;
        }
        process_for_monitor(monitors_[m], mid, obs, t_obs);
    }
}

void MonitorHub::process_for_monitor(MonitorState& mon, NodeId monitor, const TxObservation& obs,
                                     TimeUs t_obs) {
    if (obs.is_rreq) {
        const RreqPacket& pkt = obs.rreq;
        uint64_t key = 0;
        LmuState& lmu = activate_flood(mon, pkt.src_id, pkt.dest_id, pkt.bcast_id, key);
        lmu.last_touch = t_obs;
        const NodeId x = pkt.sender;
        if (x != monitor && mon.slot_of[x] >= 0) {
            LmuCell& cell = cell_for(lmu, x);
            cell.satisfied_req = true;
            fulfill_req(mon, cell);
            apply_fsm_event(mon, monitor, key, cell, FsmEvent::ReqBroadcast, t_obs);
        }
        // Presumed receipt by every monitored neighbor in range of the sender.
        for (NodeId q : mon.monitored) {
            if (q == x) continue;
            if (!topo_.adjacent(x, q)) continue;
            LmuCell& cell = cell_for(lmu, q);
            apply_fsm_event(mon, monitor, key, cell, FsmEvent::ReqReceipt, t_obs);
            if (!pkt.duplicate_flag && pkt.ttl >= 1 && q != pkt.src_id && q != pkt.dest_id) {
                create_req_obligation(mon, monitor, key, cell, t_obs);
            }
        }
    } else {
        const RrepPacket& pkt = obs.rrep;
        uint64_t key = 0;
        LmuState& lmu = activate_flood(mon, pkt.src_id, pkt.dest_id, pkt.bcast_id, key);
        lmu.last_touch = t_obs;
        const NodeId x = pkt.sender;
        const NodeId z = pkt.receiver;
        if (x != monitor && mon.slot_of[x] >= 0) {
            LmuCell& cell = cell_for(lmu, x);
            cell.satisfied_req = true;
            if (std::find(cell.rep_sent_to.begin(), cell.rep_sent_to.end(), z) ==
                cell.rep_sent_to.end()) {
                cell.rep_sent_to.push_back(z);
            }
            fulfill_req(mon, cell);
            fulfill_rep_on_transmit(mon, cell, z);
            apply_fsm_event(mon, monitor, key, cell, FsmEvent::RepTransmit, t_obs);
        }
        // The route source consumes its reply; it owes no forwarding, so its
        // machines take no receipt transition and it never incurs reply duties.
        if (z != monitor && z != pkt.src_id && mon.slot_of[z] >= 0 && topo_.adjacent(x, z)) {
            LmuCell& cell = cell_for(lmu, z);
            apply_fsm_event(mon, monitor, key, cell, FsmEvent::RepReceipt, t_obs);
            create_rep_obligation(mon, monitor, key, cell, pkt.next_to_destination, t_obs);
        }
    }
}

MonitorHub::LmuCell& MonitorHub::cell_for(LmuState& lmu, NodeId monitored) {
    auto it = std::lower_bound(lmu.cells.begin(), lmu.cells.end(), monitored,
                               [](const LmuCell& c, NodeId id) { return c.monitored < id; });
    if (it != lmu.cells.end() && it->monitored == monitored) return *it;
    LmuCell fresh;
    fresh.monitored = monitored;
    return *lmu.cells.insert(it, std::move(fresh));
}

MonitorHub::LmuState& MonitorHub::activate_flood(MonitorState& mon, NodeId src, NodeId dest,
                                                 uint32_t bcast, uint64_t& key_out) {
    key_out = flood_key(src, dest, bcast);
    return mon.lmus[key_out];
}

void MonitorHub::apply_fsm_event(MonitorState& mon, NodeId monitor, uint64_t key, LmuCell& cell,
                                 FsmEvent ev, TimeUs t_obs) {
    const FsmStep step = fsm_apply(cell.state, ev);
    for (int i = 0; i < step.recorded; ++i) {
        record(mon, monitor, cell.monitored, step.from[i], step.to[i], t_obs);
    }
    cell.state = step.next;
    if (step.arm_req_deadline) {
        cell.req_gen = ++gen_counter_;
        deadlines_.push(Deadline{t_obs + params_.rreq_timeout_us, deadline_seq_++, monitor, key,
                                 cell.monitored, kFsmReq, cell.req_gen});
    }
    if (step.arm_rep_deadline) {
        cell.rep_gen = ++gen_counter_;
        deadlines_.push(Deadline{t_obs + params_.rrep_timeout_us, deadline_seq_++, monitor, key,
                                 cell.monitored, kFsmRep, cell.rep_gen});
    }
}

void MonitorHub::record(MonitorState& mon, NodeId monitor, NodeId monitored, FsmState from,
                        FsmState to, TimeUs at) {
    const int32_t slot = mon.slot_of[monitored];
    mon.current[slot][(static_cast<int>(from) - 1) * kFsmStateCount + (static_cast<int>(to) - 1)]++;
    if (log_enabled_) log_.push_back(LoggedTransition{monitor, monitored, from, to, at});
}

void MonitorHub::create_req_obligation(MonitorState& mon, NodeId monitor, uint64_t key,
                                       LmuCell& cell, TimeUs t_obs) {
    if (cell.ob_req.status != kObNone) return;
    const int32_t slot = mon.slot_of[cell.monitored];
    mon.ledger_current[slot].obl_req++;
    mon.ledger_lifetime[slot].obl_req++;
    if (cell.satisfied_req) {
        cell.ob_req.status = kObFulfilled;
        mon.ledger_current[slot].ful_req++;
        mon.ledger_lifetime[slot].ful_req++;
        return;
    }
    cell.ob_req.status = kObPending;
    deadlines_.push(Deadline{t_obs + params_.rreq_timeout_us, deadline_seq_++, monitor, key,
                             cell.monitored, kObReq, 0});
}

void MonitorHub::create_rep_obligation(MonitorState& mon, NodeId monitor, uint64_t key,
                                       LmuCell& cell, NodeId expected, TimeUs t_obs) {
    if (cell.ob_rep.status != kObNone) return;
    const int32_t slot = mon.slot_of[cell.monitored];
    mon.ledger_current[slot].obl_rep++;
    mon.ledger_lifetime[slot].obl_rep++;
    const bool done = expected == kNoNode
                          ? !cell.rep_sent_to.empty()
                          : std::find(cell.rep_sent_to.begin(), cell.rep_sent_to.end(), expected) !=
                                cell.rep_sent_to.end();
    if (done) {
        cell.ob_rep.status = kObFulfilled;
        mon.ledger_current[slot].ful_rep++;
        mon.ledger_lifetime[slot].ful_rep++;
        return;
    }
    cell.ob_rep.status = kObPending;
    cell.ob_rep.expected = expected;
    deadlines_.push(Deadline{t_obs + params_.rrep_timeout_us, deadline_seq_++, monitor, key,
                             cell.monitored, kObRep, 0});
}

void MonitorHub::fulfill_req(MonitorState& mon, LmuCell& cell) {
    if (cell.ob_req.status != kObPending) return;
    cell.ob_req.status = kObFulfilled;
    const int32_t slot = mon.slot_of[cell.monitored];
    mon.ledger_current[slot].ful_req++;
    mon.ledger_lifetime[slot].ful_req++;
}

void MonitorHub::fulfill_rep_on_transmit(MonitorState& mon, LmuCell& cell, NodeId receiver) {
    if (cell.ob_rep.status != kObPending) return;
    if (cell.ob_rep.expected != kNoNode && cell.ob_rep.expected != receiver) return;
    cell.ob_rep.status = kObFulfilled;
    const int32_t slot = mon.slot_of[cell.monitored];
    mon.ledger_current[slot].ful_rep++;
    mon.ledger_lifetime[slot].ful_rep++;
}

void MonitorHub::advance(TimeUs t) {
    while (true) {
        const bool have_dl = !deadlines_.empty();
        const TimeUs dl_t = have_dl ? deadlines_.top().fire : 0;
        if (next_boundary_ <= t && (!have_dl || next_boundary_ <= dl_t)) {
            const TimeUs boundary = next_boundary_;
            rollover();
            prune(boundary);
            next_boundary_ += params_.window_us;
            continue;
        }
        if (have_dl && dl_t <= t) {
            const Deadline d = deadlines_.top();
            deadlines_.pop();
            fire_deadline(d);
            continue;
        }
        break;
    }
    if (t > last_time_) last_time_ = t;
}

void MonitorHub::fire_deadline(const Deadline& d) {
    MonitorState& mon = monitors_[d.monitor];
    auto lit = mon.lmus.find(d.flood_key);
    if (lit == mon.lmus.end()) return;
    LmuState& lmu = lit->second;
    auto it = std::lower_bound(lmu.cells.begin(), lmu.cells.end(), d.monitored,
                               [](const LmuCell& c, NodeId id) { return c.monitored < id; });
    if (it == lmu.cells.end() || it->monitored != d.monitored) return;
    LmuCell& cell = *it;
    switch (d.kind) {
    case kFsmReq:
        if (cell.req_gen == d.gen) {
            apply_fsm_event(mon, d.monitor, d.flood_key, cell, FsmEvent::ReqDeadline, d.fire);
        }
        break;
    case kFsmRep:
        if (cell.rep_gen == d.gen) {
            apply_fsm_event(mon, d.monitor, d.flood_key, cell, FsmEvent::RepDeadline, d.fire);
        }
        break;
    case kObReq:
        if (cell.ob_req.status == kObPending) {
            cell.ob_req.status = kObViolated;
            const int32_t slot = mon.slot_of[cell.monitored];
            mon.ledger_current[slot].viol_req++;
            mon.ledger_lifetime[slot].viol_req++;
        }
        break;
    case kObRep:
        if (cell.ob_rep.status == kObPending) {
            cell.ob_rep.status = kObViolated;
            const int32_t slot = mon.slot_of[cell.monitored];
            mon.ledger_current[slot].viol_rep++;
            mon.ledger_lifetime[slot].viol_rep++;
        }
        break;
    }
}

void MonitorHub::rollover() {
    const uint32_t d = params_.ring_windows;
    for (MonitorState& mon : monitors_) {
        if (mon.ring.size() < d) {
            mon.ring.push_back(mon.current);
            mon.ledger_ring.push_back(mon.ledger_current);
        } else {
            mon.ring[mon.ring_start] = mon.current;
            mon.ledger_ring[mon.ring_start] = mon.ledger_current;
            mon.ring_start = (mon.ring_start + 1) % d;
        }
        for (TransitionMatrix& c : mon.current) c.fill(0);
        for (LedgerCounts& c : mon.ledger_current) c = LedgerCounts{};
    }
    total_closed_++;
}

void MonitorHub::prune(TimeUs now) {
    const TimeUs keep_horizon = 2 * params_.rrep_timeout_us;
    for (MonitorState& mon : monitors_) {
        for (auto it = mon.lmus.begin(); it != mon.lmus.end();) {
            const LmuState& lmu = it->second;
            bool removable = lmu.last_touch + keep_horizon <= now;
            if (removable) {
                for (const LmuCell& cell : lmu.cells) {
                    if (cell.ob_req.status == kObPending || cell.ob_rep.status == kObPending ||
                        (cell.state != FsmState::Init && !fsm_final(cell.state))) {
                        removable = false;
                        break;
                    }
                }
            }
            it = removable ? mon.lmus.erase(it) : std::next(it);
        }
    }
}

const std::vector<NodeId>& MonitorHub::monitored_of(NodeId monitor) const {
    if (monitor >= monitors_.size()) throw UnknownNode("unknown monitor node " + std::to_string(monitor));
    return monitors_[monitor].monitored;
}

TransitionMatrix MonitorHub::aggregate(NodeId monitor, NodeId neighbor) const {
    if (monitor >= monitors_.size()) throw UnknownNode("unknown monitor node " + std::to_string(monitor));
    const MonitorState& mon = monitors_[monitor];
    const int32_t slot = mon.slot_of[neighbor];
    if (slot < 0) throw UnknownNode("node " + std::to_string(neighbor) + " is not a monitored neighbor");
    TransitionMatrix out = zero_matrix();
    for (const auto& window : mon.ring) {
        const TransitionMatrix& w = window[slot];
        for (size_t i = 0; i < out.size(); ++i) out[i] += w[i];
    }
    return out;
}

LedgerCounts MonitorHub::ledger_aggregate(NodeId monitor, NodeId neighbor) const {
    if (monitor >= monitors_.size()) throw UnknownNode("unknown monitor node " + std::to_string(monitor));
    const MonitorState& mon = monitors_[monitor];
    const int32_t slot = mon.slot_of[neighbor];
    if (slot < 0) throw UnknownNode("node " + std::to_string(neighbor) + " is not a monitored neighbor");
    LedgerCounts out;
    for (const auto& window : mon.ledger_ring) out += window[slot];
    return out;
}

LedgerCounts MonitorHub::ledger_lifetime(NodeId monitor, NodeId neighbor) const {
    if (monitor >= monitors_.size()) throw UnknownNode("unknown monitor node " + std::to_string(monitor));
    const MonitorState& mon = monitors_[monitor];
    const int32_t slot = mon.slot_of[neighbor];
    if (slot < 0) throw UnknownNode("node " + std::to_string(neighbor) + " is not a monitored neighbor");
    return mon.ledger_lifetime[slot];
}

TransitionMatrix MonitorHub::current_window(NodeId monitor, NodeId neighbor) const {
    if (monitor >= monitors_.size()) throw UnknownNode("unknown monitor node " + std::to_string(monitor));
    const MonitorState& mon = monitors_[monitor];
    const int32_t slot = mon.slot_of[neighbor];
    if (slot < 0) throw UnknownNode("node " + std::to_string(neighbor) + " is not a monitored neighbor");
    return mon.current[slot];
}

std::optional<FsmState> MonitorHub::fsm_state(NodeId monitor, NodeId src, NodeId dest,
                                              uint32_t bcast, NodeId monitored) const {
    if (monitor >= monitors_.size()) return std::nullopt;
    const MonitorState& mon = monitors_[monitor];
    auto lit = mon.lmus.find(flood_key(src, dest, bcast));
    if (lit == mon.lmus.end()) return std::nullopt;
    const auto& cells = lit->second.cells;
    auto it = std::lower_bound(cells.begin(), cells.end(), monitored,
                               [](const LmuCell& c, NodeId id) { return c.monitored < id; });
    if (it == cells.end() || it->monitored != monitored) return std::nullopt;
    return it->state;
}

} // namespace meshdetect
