#include "core/aodv_node.hpp"

namespace meshdetect {

const char* drop_reason_name(DropReason r) {
    switch (r) {
        case DropReason::SelfishDropReq: return "selfish_dropreq";
        case DropReason::SelfishDropRep: return "selfish_droprep";
        case DropReason::NoReversePath: return "no_reverse_path";
        case DropReason::MalformedPacket: return "malformed_packet";
    }
    return "unknown";
}

namespace {

uint64_t seen_key(NodeId src, uint32_t bcast) {
    return (static_cast<uint64_t>(src) << 32) | bcast;
}

// Hop the RREP receiver will forward to, when the sender can know it: the
// source itself when the receiver is the flood's stamped first hop. Unknown
// (sentinel) otherwise; the source consumes and forwards to nobody.
NodeId expected_next_hop(NodeId receiver, NodeId src_id, NodeId stamped_first_hop) {
    if (receiver == src_id) return kNoNode;
    if (receiver != kNoNode && receiver == stamped_first_hop) return src_id;
    return kNoNode;
}

} // namespace

RreqPacket NodeState::originate_rreq(NodeId dest, TimeUs now, int initial_ttl,
                                     TimeUs reverse_lifetime) {
    bcast_counter_++;
    seq_num_++;
    RreqPacket pkt;
    pkt.src_id = id_;
    pkt.dest_id = dest;
    pkt.src_seq_num = seq_num_;
    pkt.dest_seq_num = 0;
    pkt.bcast_id = bcast_counter_;
    pkt.ttl = initial_ttl;
    pkt.sender = id_;
    pkt.next_to_source = kNoNode;
    pkt.duplicate_flag = false;

    // Returning copies of the own flood must be recognized as duplicates.
    SeenRreq& s = seen_[seen_key(id_, bcast_counter_)];
    s.dest_id = dest;
    s.bcast_id = bcast_counter_;
    s.reverse_pred = kNoNode;
    s.next_to_source = kNoNode;
    s.copies_heard = 1;
    s.expires_at = now + reverse_lifetime;
    return pkt;
}

SeenRreq* NodeState::find_seen(NodeId src, uint32_t bcast, TimeUs now) {
    auto it = seen_.find(seen_key(src, bcast));
    if (it == seen_.end()) return nullptr;
    if (it->second.expires_at <= now) {
        seen_.erase(it);
        return nullptr;
    }
    return &it->second;
}

const SeenRreq* NodeState::find_reverse(NodeId src, NodeId dest, TimeUs now) const {
    const SeenRreq* best = nullptr;
    for (const auto& [key, s] : seen_) {
        if ((key >> 32) != src) continue;
        if (s.dest_id != dest || s.expires_at <= now) continue;
        if (!best || s.bcast_id > best->bcast_id) best = &s;
    }
    return best;
}

const RouteEntry* NodeState::valid_route(NodeId dest, TimeUs now) const {
    auto it = routes_.find(dest);
    if (it == routes_.end() || it->second.expires_at <= now) return nullptr;
    return &it->second;
}

RrepPacket NodeState::make_reply(const SeenRreq& seen, NodeId src_id, uint32_t hop_count,
                                 uint32_t dest_seq) const {
    RrepPacket rep;
    rep.src_id = src_id;
    rep.dest_id = seen.dest_id;
    rep.dest_seq_num = dest_seq;
    rep.bcast_id = seen.bcast_id;
    rep.hop_count = hop_count;
    rep.sender = id_;
    rep.receiver = seen.reverse_pred;
    rep.next_to_source = seen.next_to_source;
    rep.duplicate_flag = false;
    rep.next_to_destination = expected_next_hop(rep.receiver, src_id, seen.next_to_source);
    return rep;
}

NodeAction NodeState::handle_rreq(const RreqPacket& pkt, TimeUs now, TimeUs reverse_lifetime,
                                  TimeUs route_lifetime, Rng& behavior_rng) {
    if (pkt.ttl < 0) return ActionDrop{DropReason::MalformedPacket};
    if (pkt.src_id == id_) {
        if (SeenRreq* seen = find_seen(pkt.src_id, pkt.bcast_id, now)) seen->copies_heard++;
        return ActionIgnore{};
    }
    if (SeenRreq* seen = find_seen(pkt.src_id, pkt.bcast_id, now)) {
        seen->copies_heard++;
        return ActionIgnore{};
    }

    SeenRreq& seen = seen_[seen_key(pkt.src_id, pkt.bcast_id)];
    seen.dest_id = pkt.dest_id;
    seen.bcast_id = pkt.bcast_id;
    seen.reverse_pred = pkt.sender;
    seen.next_to_source = pkt.next_to_source;
    seen.copies_heard = 1;
    seen.expires_at = now + reverse_lifetime;

    if (pkt.dest_id == id_) {
        // The destination always answers, selfish or not.
        seq_num_++;
        return ActionSendRrep{make_reply(seen, pkt.src_id, 0, seq_num_)};
    }

    if (behavior_ == NodeBehavior::SelfishDropReq && behavior_rng.bernoulli(drop_prob_))
        return ActionDrop{DropReason::SelfishDropReq};

    // A DropRep node never answers from its cache ("always rebroadcasts").
    if (behavior_ != NodeBehavior::SelfishDropRep) {
        if (const RouteEntry* route = valid_route(pkt.dest_id, now))
            return ActionSendRrep{make_reply(seen, pkt.src_id, route->hop_count,
                                             route->dest_seq_num)};
    }

    if (pkt.ttl < 1) return ActionIgnore{};
    RreqPacket out = pkt;
    out.sender = id_;
    out.ttl = pkt.ttl - 1;
    if (pkt.sender == pkt.src_id) out.next_to_source = id_; // first-hop stamp
    out.duplicate_flag = seen.copies_heard >= 2;
    (void)route_lifetime;
    return ActionRebroadcast{out};
}

NodeAction NodeState::handle_rrep(const RrepPacket& pkt, TimeUs now, TimeUs route_lifetime,
                                  Rng& behavior_rng) {
    if (pkt.receiver != id_) return ActionIgnore{};

    if (pkt.src_id == id_) {
        RouteEntry entry;
        entry.dest = pkt.dest_id;
        entry.next_hop = pkt.sender;
        entry.hop_count = pkt.hop_count + 1;
        entry.dest_seq_num = pkt.dest_seq_num;
        entry.expires_at = now + route_lifetime;
        routes_[entry.dest] = entry;
        return ActionConsumeRrep{entry};
    }

    const SeenRreq* rev = find_reverse(pkt.src_id, pkt.dest_id, now);
    if (!rev) return ActionDrop{DropReason::NoReversePath};

    if (behavior_ == NodeBehavior::SelfishDropRep && behavior_rng.bernoulli(drop_prob_))
        return ActionDrop{DropReason::SelfishDropRep};

    RouteEntry entry;
    entry.dest = pkt.dest_id;
    entry.next_hop = pkt.sender;
    entry.hop_count = pkt.hop_count + 1;
    entry.dest_seq_num = pkt.dest_seq_num;
    entry.expires_at = now + route_lifetime;
    routes_[entry.dest] = entry;

    RrepPacket out = pkt;
    out.sender = id_;
    out.receiver = rev->reverse_pred;
    out.hop_count = pkt.hop_count + 1;
    out.next_to_destination = expected_next_hop(out.receiver, pkt.src_id, rev->next_to_source);
    return ActionForwardRrep{out};
}

} // namespace meshdetect
