#pragma once

#include <cstdint>

#include "core/topology.hpp"

namespace meshdetect {

// Route request, flooded by broadcast. `sender` is the transmitting hop;
// next_to_source and duplicate_flag are the monitoring header extensions.
struct RreqPacket {
    NodeId src_id = kNoNode;       // originator of the discovery
    NodeId dest_id = kNoNode;      // target of the discovery
    uint32_t src_seq_num = 0;
    uint32_t dest_seq_num = 0;
    uint32_t bcast_id = 0;         // per-source flood counter
    int ttl = 0;
    NodeId sender = kNoNode;       // transmitting hop
    NodeId next_to_source = kNoNode; // first-hop forwarder, stamped once
    bool duplicate_flag = false;
};

// Route reply, unicast hop by hop along the reverse path toward src_id.
// Carries the bcast_id of the request flood it answers so overhearing
// monitors can attribute it to the right flood unambiguously.
struct RrepPacket {
    NodeId src_id = kNoNode;       // discovery originator (reply destination)
    NodeId dest_id = kNoNode;      // discovery target (reply subject)
    uint32_t dest_seq_num = 0;
    uint32_t bcast_id = 0;         // flood this reply answers
    uint32_t hop_count = 0;        // hops from the replying node so far
    NodeId sender = kNoNode;
    NodeId receiver = kNoNode;     // addressed next hop on the reverse path
    NodeId next_to_source = kNoNode;
    bool duplicate_flag = false;
    NodeId next_to_destination = kNoNode; // hop the receiver must forward to
};

enum class DropReason {
    SelfishDropReq,
    SelfishDropRep,
    NoReversePath,
    MalformedPacket,
};

const char* drop_reason_name(DropReason r);

} // namespace meshdetect
