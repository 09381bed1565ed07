#pragma once

#include <cstdint>
#include <vector>

#include "core/detect.hpp"
#include "core/monitor_hub.hpp"

namespace meshdetect {

struct FusionPolicy {
    bool enabled = true;
    double theta_hard = 0.5;   // violation ratio that alone convicts
    uint32_t n_min = 5;        // obligations needed for ratio or override
    uint32_t confirm_min = 1;  // violations confirming a statistical verdict
};

// Combines one monitor's statistical verdict about a neighbor with that
// neighbor's obligation ledger. Disabled policy returns the verdict as is.
Verdict fuse_verdict(Verdict stat, const LedgerCounts& ledger, const FusionPolicy& policy);

std::vector<Verdict> fuse_all(const std::vector<Verdict>& stat,
                              const std::vector<LedgerCounts>& ledgers,
                              const FusionPolicy& policy);

// Network-level verdict for one node over all monitors that judged it:
// Selfish on a strict majority of Selfish over Cooperative votes,
// Unascertained votes abstain, ties go to Cooperative, all-abstain stays
// Unascertained. Throws NoMonitors on an empty vote list.
Verdict node_verdict_majority(const std::vector<Verdict>& votes);

} // namespace meshdetect
