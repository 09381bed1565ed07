#include "core/metrics.hpp"

#include <algorithm>

#include "core/timebase.hpp"

namespace meshdetect {

DetectionSnapshot snapshot_detection(const MonitorHub& hub, uint32_t node_count,
                                     const DetectorParams& params, TimeUs window_end) {
    DetectionSnapshot snap;
    snap.window_end = window_end;
    snap.monitors.reserve(node_count);
    for (NodeId m = 0; m < node_count; ++m) {
        const std::vector<NodeId>& neighbors = hub.monitored_of(m);
        if (neighbors.empty()) continue;
        MonitorSnapshot ms;
        ms.monitor = m;
        ms.neighbors = neighbors;
        std::vector<TransitionMatrix> aggregates;
        aggregates.reserve(neighbors.size());
        for (NodeId q : neighbors) {
            aggregates.push_back(hub.aggregate(m, q));
            ms.ledgers.push_back(hub.ledger_aggregate(m, q));
            ms.lifetime.push_back(hub.ledger_lifetime(m, q));
        }
        ms.stat = detect_monitor(aggregates, params);
        snap.monitors.push_back(std::move(ms));
    }
    return snap;
}

WindowRates evaluate_window(const DetectionSnapshot& snap, uint32_t node_count,
                            const std::vector<NodeId>& selfish, const FusionPolicy& policy) {
    // Statistical verdicts are aggregated across monitors by majority vote;
    // obligation evidence is pooled, every monitor's ledger for the node
    // summed into one, so scattered per-monitor observations of the same
    // behavior reinforce each other. Fusion then runs once per node on the
    // aggregated pair.
    std::vector<std::vector<Verdict>> stat_votes(node_count);
    std::vector<LedgerCounts> pooled(node_count);
    for (const MonitorSnapshot& ms : snap.monitors) {
        for (size_t i = 0; i < ms.neighbors.size(); ++i) {
            const NodeId q = ms.neighbors[i];
            stat_votes[q].push_back(ms.stat.verdicts[i]);
            const LedgerCounts& c = ms.ledgers[i];
            LedgerCounts& p = pooled[q];
            p.obl_req += c.obl_req;
            p.ful_req += c.ful_req;
            p.viol_req += c.viol_req;
            p.obl_rep += c.obl_rep;
            p.ful_rep += c.ful_rep;
            p.viol_rep += c.viol_rep;
        }
    }

    WindowRates rates;
    rates.window_end = snap.window_end;
    rates.node_verdicts.resize(node_count, Verdict::Unascertained);
    for (NodeId v = 0; v < node_count; ++v) {
        if (stat_votes[v].empty()) continue;
        const Verdict stat_net = node_verdict_majority(stat_votes[v]);
        rates.node_verdicts[v] = fuse_verdict(stat_net, pooled[v], policy);
    }

    uint32_t hits = 0;
    uint32_t false_positives = 0;
    for (NodeId v = 0; v < node_count; ++v) {
        const bool truly_selfish = std::binary_search(selfish.begin(), selfish.end(), v);
        const bool flagged = rates.node_verdicts[v] == Verdict::Selfish;
        if (truly_selfish && flagged) ++hits;
        if (!truly_selfish && flagged) ++false_positives;
    }
    if (!selfish.empty())
        rates.detection_rate = static_cast<double>(hits) / static_cast<double>(selfish.size());
    const uint32_t honest = node_count - static_cast<uint32_t>(selfish.size());
    rates.false_positive_rate =
        honest == 0 ? 0.0 : static_cast<double>(false_positives) / static_cast<double>(honest);
    return rates;
}

namespace {

nlohmann::ordered_json ledger_json(const LedgerCounts& c) {
    nlohmann::ordered_json j;
    j["obl_req"] = c.obl_req;
    j["ful_req"] = c.ful_req;
    j["viol_req"] = c.viol_req;
    j["obl_rep"] = c.obl_rep;
    j["ful_rep"] = c.ful_rep;
    j["viol_rep"] = c.viol_rep;
    return j;
}

nlohmann::ordered_json rates_json(const WindowRates& rates) {
    nlohmann::ordered_json j;
    if (rates.detection_rate)
        j["detection_rate"] = *rates.detection_rate;
    else
        j["detection_rate"] = nullptr;
    j["false_positive_rate"] = rates.false_positive_rate;
    nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
    for (Verdict v : rates.node_verdicts) verdicts.push_back(verdict_name(v));
    j["node_verdicts"] = std::move(verdicts);
    return j;
}

} // namespace

nlohmann::ordered_json metrics_json(const ScenarioConfig& cfg, const std::vector<NodeId>& selfish,
                                    const std::vector<DetectionSnapshot>& snapshots) {
    nlohmann::ordered_json doc;
    doc["kind"] = "metrics";
    doc["version"] = 1;

    nlohmann::ordered_json conf;
    for (const std::string& key : config_keys()) conf[key] = config_get(cfg, key);
    doc["config"] = std::move(conf);

    // Application traffic bookkeeping; data packets themselves are not
    // simulated.
    doc["traffic_accounting"] = {{"cbr_rate_pps", 60}, {"packet_size_bytes", 512}};

    doc["selfish"] = selfish;

    const FusionPolicy fused_policy{true, cfg.theta_hard, cfg.n_min, cfg.confirm_min};
    const FusionPolicy stat_policy{false, cfg.theta_hard, cfg.n_min, cfg.confirm_min};

    nlohmann::ordered_json windows = nlohmann::ordered_json::array();
    for (const DetectionSnapshot& snap : snapshots) {
        nlohmann::ordered_json w;
        w["window_end"] = us_to_seconds(snap.window_end);
        w["crosscheck"] = rates_json(evaluate_window(snap, cfg.node_count, selfish, fused_policy));
        w["stat_only"] = rates_json(evaluate_window(snap, cfg.node_count, selfish, stat_policy));

        nlohmann::ordered_json monitors = nlohmann::ordered_json::array();
        for (const MonitorSnapshot& ms : snap.monitors) {
            nlohmann::ordered_json mj;
            mj["monitor"] = ms.monitor;
            mj["neighbors"] = ms.neighbors;
            nlohmann::ordered_json stat = nlohmann::ordered_json::array();
            for (Verdict v : ms.stat.verdicts) stat.push_back(verdict_name(v));
            mj["stat_verdicts"] = std::move(stat);
            mj["scores"] = ms.stat.scores;
            nlohmann::ordered_json pseq = nlohmann::ordered_json::array();
            for (const auto& [k, p] : ms.stat.p_sequence) pseq.push_back({{"k", k}, {"p", p}});
            mj["p_sequence"] = std::move(pseq);
            if (ms.stat.chosen_k)
                mj["chosen_k"] = *ms.stat.chosen_k;
            else
                mj["chosen_k"] = nullptr;
            nlohmann::ordered_json ledgers = nlohmann::ordered_json::array();
            for (const LedgerCounts& c : ms.ledgers) ledgers.push_back(ledger_json(c));
            mj["ledgers"] = std::move(ledgers);
            nlohmann::ordered_json lifetime = nlohmann::ordered_json::array();
            for (const LedgerCounts& c : ms.lifetime) lifetime.push_back(ledger_json(c));
            mj["ledgers_lifetime"] = std::move(lifetime);
            monitors.push_back(std::move(mj));
        }
        w["monitors"] = std::move(monitors);
        windows.push_back(std::move(w));
    }
    doc["windows"] = std::move(windows);

    nlohmann::ordered_json summary;
    summary["windows"] = snapshots.size();
    summary["crosscheck_enabled"] = cfg.crosscheck_enabled;
    if (!snapshots.empty()) {
        const FusionPolicy& active = cfg.crosscheck_enabled ? fused_policy : stat_policy;
        WindowRates last = evaluate_window(snapshots.back(), cfg.node_count, selfish, active);
        if (last.detection_rate)
            summary["final_detection_rate"] = *last.detection_rate;
        else
            summary["final_detection_rate"] = nullptr;
        summary["final_false_positive_rate"] = last.false_positive_rate;
    } else {
        summary["final_detection_rate"] = nullptr;
        summary["final_false_positive_rate"] = nullptr;
    }
    doc["summary"] = std::move(summary);
    return doc;
}

} // namespace meshdetect
