#include "core/fusion.hpp"

#include "core/errors.hpp"

namespace meshdetect {

Verdict fuse_verdict(Verdict stat, const LedgerCounts& ledger, const FusionPolicy& policy) {
    if (!policy.enabled) return stat;
    const uint32_t obligations = ledger.obligations_total();
    const uint32_t violations = ledger.violations_total();
    if (obligations >= policy.n_min &&
        static_cast<double>(violations) / static_cast<double>(obligations) >= policy.theta_hard) {
        return Verdict::Selfish;
    }
    if (stat == Verdict::Selfish && violations >= policy.confirm_min) return Verdict::Selfish;
    if (stat == Verdict::Selfish && violations == 0 && obligations >= policy.n_min) {
        return Verdict::Cooperative;
    }
    return stat;
}

std::vector<Verdict> fuse_all(const std::vector<Verdict>& stat,
                              const std::vector<LedgerCounts>& ledgers,
                              const FusionPolicy& policy) {
    std::vector<Verdict> out(stat.size());
    for (size_t i = 0; i < stat.size(); ++i) out[i] = fuse_verdict(stat[i], ledgers[i], policy);
    return out;
}

Verdict node_verdict_majority(const std::vector<Verdict>& votes) {
    if (votes.empty()) throw NoMonitors("node has no monitor verdicts");
    int selfish = 0;
    int cooperative = 0;
    for (Verdict v : votes) {
        if (v == Verdict::Selfish) ++selfish;
        if (v == Verdict::Cooperative) ++cooperative;
    }
    if (selfish == 0 && cooperative == 0) return Verdict::Unascertained;
    return selfish > cooperative ? Verdict::Selfish : Verdict::Cooperative;
}

} // namespace meshdetect
