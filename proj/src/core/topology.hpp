#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/config.hpp"
#include "core/rng.hpp"

namespace meshdetect {

using NodeId = uint32_t;

// Sentinel for "no node" (unset extension header fields, absent next hops).
constexpr NodeId kNoNode = 0xffffffffu;

struct Position {
    double x = 0.0;
    double y = 0.0;
};

// Static unit-disk topology: fixed positions, symmetric adjacency for every
// pair within radio range.
class Topology {
public:
    Topology() = default;

    // Builds adjacency from explicit positions (used by tests and replay).
    // Throws ConnectivityUnreachable if require_connected and the graph is not
    // connected.
    static Topology from_positions(std::vector<Position> positions, double radio_range,
                                   bool require_connected = true);

    uint32_t node_count() const { return static_cast<uint32_t>(positions_.size()); }
    double radio_range() const { return range_; }
    const std::vector<Position>& positions() const { return positions_; }

    // Sorted neighbor ids. Throws UnknownNode for out-of-range ids.
    const std::vector<NodeId>& neighbors(NodeId id) const;

    bool adjacent(NodeId a, NodeId b) const;
    bool connected() const;

private:
    std::vector<Position> positions_;
    double range_ = 0.0;
    std::vector<std::vector<NodeId>> adj_;
    std::vector<uint64_t> adj_bits_; // node_count x node_count bit matrix
    size_t words_per_row_ = 0;
};

// Samples node positions uniformly in the configured area until the induced
// graph is connected, resampling the whole layout up to 1000 times before
// giving up with ConnectivityUnreachable. Draws come from `placement`.
Topology build_topology(const ScenarioConfig& cfg, Rng& placement);

} // namespace meshdetect
