#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "core/packet.hpp"
#include "core/rng.hpp"
#include "core/timebase.hpp"

namespace meshdetect {

enum class NodeBehavior { Honest, SelfishDropReq, SelfishDropRep };

struct RouteEntry {
    NodeId dest = kNoNode;
    NodeId next_hop = kNoNode;
    uint32_t hop_count = 0;
    uint32_t dest_seq_num = 0;
    TimeUs expires_at = 0;
};

// Record of a flood seen by a node: duplicate suppression, the reverse-path
// predecessor and the stamped first-hop id. Deleted (by expiry check) when the
// reverse-path timer runs out.
struct SeenRreq {
    NodeId dest_id = kNoNode;
    uint32_t bcast_id = 0;
    NodeId reverse_pred = kNoNode;   // neighbor the first copy arrived from
    NodeId next_to_source = kNoNode; // as carried by the first copy
    uint32_t copies_heard = 0;
    TimeUs expires_at = 0;
};

// Outcome of handling one packet. At most one action; drops are silent on the
// wire and reported here only so the engine can log them.
struct ActionRebroadcast { RreqPacket packet; };
struct ActionSendRrep { RrepPacket packet; };
struct ActionForwardRrep { RrepPacket packet; };
struct ActionConsumeRrep { RouteEntry installed; };
struct ActionIgnore {};
struct ActionDrop { DropReason reason; };

using NodeAction = std::variant<ActionIgnore, ActionRebroadcast, ActionSendRrep,
                                ActionForwardRrep, ActionConsumeRrep, ActionDrop>;

// Per-node protocol state. Route and flood tables use lazy expiry.
class NodeState {
public:
    NodeState() = default;
    NodeState(NodeId id, NodeBehavior behavior, double drop_prob)
        : id_(id), behavior_(behavior), drop_prob_(drop_prob) {}

    NodeId id() const { return id_; }
    NodeBehavior behavior() const { return behavior_; }
    bool selfish() const { return behavior_ != NodeBehavior::Honest; }

    // Starts a new discovery toward dest. The caller checks for an existing
    // valid route first.
    RreqPacket originate_rreq(NodeId dest, TimeUs now, int initial_ttl, TimeUs reverse_lifetime);

    // Handles one delivered RREQ copy. `behavior_rng` supplies the selfish
    // drop draw; honest handling makes no draws.
    NodeAction handle_rreq(const RreqPacket& pkt, TimeUs now, TimeUs reverse_lifetime,
                           TimeUs route_lifetime, Rng& behavior_rng);

    // Handles one delivered RREP addressed to this node.
    NodeAction handle_rrep(const RrepPacket& pkt, TimeUs now, TimeUs route_lifetime,
                           Rng& behavior_rng);

    const RouteEntry* valid_route(NodeId dest, TimeUs now) const;

    uint32_t last_bcast_id() const { return bcast_counter_; }

private:
    RrepPacket make_reply(const SeenRreq& seen, NodeId src_id, uint32_t hop_count,
                          uint32_t dest_seq) const;
    SeenRreq* find_seen(NodeId src, uint32_t bcast, TimeUs now);
    const SeenRreq* find_reverse(NodeId src, NodeId dest, TimeUs now) const;

    NodeId id_ = kNoNode;
    NodeBehavior behavior_ = NodeBehavior::Honest;
    double drop_prob_ = 0.0;
    uint32_t bcast_counter_ = 0;
    uint32_t seq_num_ = 0;
    std::unordered_map<NodeId, RouteEntry> routes_;
    std::unordered_map<uint64_t, SeenRreq> seen_; // key: src << 32 | bcast
};

} // namespace meshdetect
