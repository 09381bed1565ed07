#include "core/topology.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace meshdetect {

Topology Topology::from_positions(std::vector<Position> positions, double radio_range,
                                  bool require_connected) {
    Topology t;
    t.positions_ = std::move(positions);
    t.range_ = radio_range;
    const uint32_t n = t.node_count();
    t.adj_.assign(n, {});
    t.words_per_row_ = (n + 63) / 64;
    t.adj_bits_.assign(t.words_per_row_ * n, 0);
    const double r2 = radio_range * radio_range;
    for (uint32_t i = 0; i < n; i++) {
        for (uint32_t j = i + 1; j < n; j++) {
            const double dx = t.positions_[i].x - t.positions_[j].x;
            const double dy = t.positions_[i].y - t.positions_[j].y;
            if (dx * dx + dy * dy <= r2) {
                t.adj_[i].push_back(j);
                t.adj_[j].push_back(i);
                t.adj_bits_[t.words_per_row_ * i + j / 64] |= 1ULL << (j % 64);
                t.adj_bits_[t.words_per_row_ * j + i / 64] |= 1ULL << (i % 64);
            }
        }
    }
    if (require_connected && !t.connected())
        throw ConnectivityUnreachable("topology is not connected");
    return t;
}

const std::vector<NodeId>& Topology::neighbors(NodeId id) const {
    if (id >= node_count()) throw UnknownNode("unknown node id " + std::to_string(id));
    return adj_[id];
}

bool Topology::adjacent(NodeId a, NodeId b) const {
    if (a >= node_count() || b >= node_count()) return false;
    return (adj_bits_[words_per_row_ * a + b / 64] >> (b % 64)) & 1ULL;
}

bool Topology::connected() const {
    const uint32_t n = node_count();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    uint32_t visited = 1;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : adj_[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                visited++;
                stack.push_back(w);
            }
        }
    }
    return visited == n;
}

Topology build_topology(const ScenarioConfig& cfg, Rng& placement) {
    constexpr int kMaxAttempts = 1000;
    for (int attempt = 0; attempt < kMaxAttempts; attempt++) {
        std::vector<Position> pos(cfg.node_count);
        for (auto& p : pos) {
            p.x = placement.uniform(0.0, cfg.area_width);
            p.y = placement.uniform(0.0, cfg.area_height);
        }
        Topology t = Topology::from_positions(std::move(pos), cfg.radio_range,
                                              /*require_connected=*/false);
        if (t.connected()) return t;
    }
    throw ConnectivityUnreachable("no connected layout found in " +
                                  std::to_string(kMaxAttempts) + " placement attempts");
}

} // namespace meshdetect
