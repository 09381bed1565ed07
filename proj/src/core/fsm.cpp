#include "core/fsm.hpp"

namespace meshdetect {

namespace {

FsmStep no_change(FsmState s) { return FsmStep{s, 0, {}, {}, false, false}; }

FsmStep step_to(FsmState from, FsmState to) {
    FsmStep r{to, 1, {from}, {to}, false, false};
    r.arm_req_deadline = (to == FsmState::RcvdRreq || to == FsmState::FwdRreq);
    r.arm_rep_deadline = (to == FsmState::RcvdRrep || to == FsmState::UnexpRrep);
    return r;
}

} // namespace

FsmStep fsm_apply(FsmState state, FsmEvent ev) {
    if (fsm_final(state)) return no_change(state);

    switch (ev) {
        case FsmEvent::ReqReceipt:
            switch (state) {
                case FsmState::Init: return step_to(FsmState::Init, FsmState::RcvdRreq);
                case FsmState::RcvdRreq: return step_to(FsmState::RcvdRreq, FsmState::RcvdRreq);
                case FsmState::FwdRreq: return step_to(FsmState::FwdRreq, FsmState::FwdRreq);
                default: return no_change(state);
            }
        case FsmEvent::ReqBroadcast:
            switch (state) {
                case FsmState::Init: return step_to(FsmState::Init, FsmState::FwdRreq);
                case FsmState::RcvdRreq: return step_to(FsmState::RcvdRreq, FsmState::FwdRreq);
                case FsmState::FwdRreq: return step_to(FsmState::FwdRreq, FsmState::FwdRreq);
                default: return no_change(state);
            }
        case FsmEvent::RepReceipt:
            switch (state) {
                case FsmState::Init: return step_to(FsmState::Init, FsmState::UnexpRrep);
                case FsmState::RcvdRreq: return step_to(FsmState::RcvdRreq, FsmState::RcvdRrep);
                case FsmState::FwdRreq: return step_to(FsmState::FwdRreq, FsmState::RcvdRrep);
                default: return no_change(state);
            }
        case FsmEvent::RepTransmit:
            switch (state) {
                case FsmState::Init: {
                    // An RREP out of nowhere both establishes the unexpected-
                    // RREP context and completes it.
                    FsmStep r{FsmState::LmuComplete, 2,
                              {FsmState::Init, FsmState::UnexpRrep},
                              {FsmState::UnexpRrep, FsmState::LmuComplete},
                              false, false};
                    return r;
                }
                case FsmState::UnexpRrep: return step_to(FsmState::UnexpRrep, FsmState::LmuComplete);
                case FsmState::RcvdRreq: return step_to(FsmState::RcvdRreq, FsmState::LmuComplete);
                case FsmState::FwdRreq: return step_to(FsmState::FwdRreq, FsmState::LmuComplete);
                case FsmState::RcvdRrep: return step_to(FsmState::RcvdRrep, FsmState::LmuComplete);
                default: return no_change(state);
            }
        case FsmEvent::ReqDeadline:
            switch (state) {
                case FsmState::RcvdRreq: return step_to(FsmState::RcvdRreq, FsmState::TimeoutRreq);
                case FsmState::FwdRreq: return step_to(FsmState::FwdRreq, FsmState::TimeoutRreq);
                default: return no_change(state);
            }
        case FsmEvent::RepDeadline:
            switch (state) {
                case FsmState::UnexpRrep: return step_to(FsmState::UnexpRrep, FsmState::TimeoutRrep);
                case FsmState::RcvdRrep: return step_to(FsmState::RcvdRrep, FsmState::TimeoutRrep);
                default: return no_change(state);
            }
    }
    return no_change(state);
}

bool fsm_edge_allowed(FsmState from, FsmState to) {
    const int f = static_cast<int>(from), t = static_cast<int>(to);
    static const bool table[9][9] = {
        // indexed [from][to], 1-based states
        {}, // 0 unused
        {0, 0, 1, 1, 1, 0, 0, 0, 0}, // 1 -> 2,3,4
        {0, 0, 0, 0, 0, 0, 0, 1, 1}, // 2 -> 7,8
        {0, 0, 0, 1, 1, 1, 1, 1, 0}, // 3 -> 3,4,5,6,7
        {0, 0, 0, 0, 1, 1, 1, 1, 0}, // 4 -> 4,5,6,7
        {}, // 5 final
        {0, 0, 0, 0, 0, 0, 0, 1, 1}, // 6 -> 7,8
        {}, // 7 final
        {}, // 8 final
    };
    if (f < 1 || f > 8 || t < 1 || t > 8) return false;
    return table[f][t];
}

} // namespace meshdetect
