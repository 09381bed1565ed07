#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/detect.hpp"
#include "core/fusion.hpp"
#include "core/monitor_hub.hpp"

namespace meshdetect {

// One monitor's detection output at a tick: the statistical pipeline result
// over its neighbors plus their obligation ledgers (detection-span aggregate
// and run lifetime), everything fusion and reporting need later.
struct MonitorSnapshot {
    NodeId monitor = kNoNode;
    std::vector<NodeId> neighbors;
    ClassificationResult stat;
    std::vector<LedgerCounts> ledgers;
    std::vector<LedgerCounts> lifetime;
};

struct DetectionSnapshot {
    TimeUs window_end = 0;
    std::vector<MonitorSnapshot> monitors;
};

// Runs the statistical pipeline for every monitor over the hub's current
// detection-span aggregates. The hub must already be advanced to window_end.
DetectionSnapshot snapshot_detection(const MonitorHub& hub, uint32_t node_count,
                                     const DetectorParams& params, TimeUs window_end);

struct WindowRates {
    TimeUs window_end = 0;
    std::optional<double> detection_rate; // absent when no selfish nodes planted
    double false_positive_rate = 0.0;
    std::vector<Verdict> node_verdicts;
};

// Fuses a snapshot under the given policy and scores the per-node majority
// verdicts against the planted selfish set (sorted ascending).
WindowRates evaluate_window(const DetectionSnapshot& snap, uint32_t node_count,
                            const std::vector<NodeId>& selfish, const FusionPolicy& policy);

// Full metrics document for one run: config echo, planted selfish set, and
// per-tick rates plus per-monitor detail, under both fusion modes.
nlohmann::ordered_json metrics_json(const ScenarioConfig& cfg, const std::vector<NodeId>& selfish,
                                    const std::vector<DetectionSnapshot>& snapshots);

} // namespace meshdetect
