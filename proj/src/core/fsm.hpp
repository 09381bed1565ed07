#pragma once

#include <cstdint>

namespace meshdetect {

// Per-(monitor, monitored, local monitoring unit) protocol state machine.
// States 5, 7 and 8 are final; a machine there ignores further events.
enum class FsmState : uint8_t {
    Init = 1,        // nothing observed yet
    UnexpRrep = 2,   // RREP involvement without a prior RREQ
    RcvdRreq = 3,    // monitored node received the RREQ
    FwdRreq = 4,     // monitored node broadcast the RREQ
    TimeoutRreq = 5, // forwarding deadline expired
    RcvdRrep = 6,    // RREP was sent to the monitored node
    LmuComplete = 7, // monitored node forwarded / answered
    TimeoutRrep = 8, // reply deadline expired
};

constexpr int kFsmStateCount = 8;

inline bool fsm_final(FsmState s) {
    return s == FsmState::TimeoutRreq || s == FsmState::LmuComplete || s == FsmState::TimeoutRrep;
}

// Observable happenings that drive the machine.
enum class FsmEvent : uint8_t {
    ReqReceipt,    // an RREQ delivery to the monitored node was observed/presumed
    ReqBroadcast,  // the monitored node broadcast the RREQ
    RepReceipt,    // an RREP addressed to the monitored node was observed
    RepTransmit,   // the monitored node transmitted an RREP
    ReqDeadline,   // forwarding deadline fired
    RepDeadline,   // reply deadline fired
};

// Result of applying an event: zero, one or two recorded transitions (the
// two-step case is an RREP transmitted straight out of Init).
struct FsmStep {
    FsmState next;
    uint8_t recorded = 0;               // number of recorded transitions
    FsmState from[2]{};                 // recorded edges from[i] -> to[i]
    FsmState to[2]{};
    bool arm_req_deadline = false;
    bool arm_rep_deadline = false;
};

// Applies `ev` in `state`. Events with no edge in the declared transition
// table leave the state unchanged and record nothing.
FsmStep fsm_apply(FsmState state, FsmEvent ev);

// True iff (from, to) is an edge of the declared transition table.
bool fsm_edge_allowed(FsmState from, FsmState to);

} // namespace meshdetect
