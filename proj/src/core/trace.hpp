#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/monitor_hub.hpp"
#include "core/packet.hpp"
#include "core/topology.hpp"

namespace meshdetect {

constexpr int kTraceVersion = 1;

// JSONL event log. The header line carries everything replay needs (config,
// node positions, planted selfish set); each transmission line carries the
// packet, its latency and the recipients that lost it, so the monitoring
// pipeline can be re-fed exactly. Field order is fixed and numbers are
// rendered deterministically, which makes equal runs byte-equal.
class TraceWriter {
public:
    explicit TraceWriter(std::ostream& out) : out_(out) {}

    void write_header(const ScenarioConfig& cfg, const Topology& topo,
                      const std::vector<NodeId>& selfish);
    void write_tx(const TxObservation& obs);
    void write_drop(TimeUs t, NodeId node, DropReason reason, bool rreq, NodeId orig, NodeId dest,
                    uint32_t bcast);

private:
    std::ostream& out_;
};

struct TraceHeader {
    ScenarioConfig config;
    std::vector<Position> positions;
    std::vector<NodeId> selfish;
};

class TraceReader {
public:
    explicit TraceReader(std::istream& in) : in_(in) {}

    // Reads and validates the header line. Must be called first.
    TraceHeader read_header();

    // Next transmission record, skipping drop lines; nullopt at end of file.
    std::optional<TxObservation> next();

private:
    std::istream& in_;
    size_t lineno_ = 0;
};

// Formats integer microseconds as fixed 6-decimal seconds ("12.345678").
std::string format_time_us(TimeUs t);

} // namespace meshdetect
