#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/metrics.hpp"
#include "core/topology.hpp"

namespace meshdetect {

struct SimResult {
    ScenarioConfig config;
    std::vector<Position> positions;
    std::vector<NodeId> selfish;
    std::vector<DetectionSnapshot> snapshots;
    nlohmann::ordered_json metrics;
};

// Runs one scenario end to end: placement, sessions, route discoveries,
// monitoring and periodic detection. When trace_out is set, every
// transmission and drop is logged as one JSONL line after a header line.
SimResult run_simulation(const ScenarioConfig& cfg, std::ostream* trace_out = nullptr);

// Rebuilds the monitoring and detection pipeline from a trace, producing the
// same snapshots and metrics as the run that wrote it.
SimResult replay_trace(std::istream& trace_in);

} // namespace meshdetect
