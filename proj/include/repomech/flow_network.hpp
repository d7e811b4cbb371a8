#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "repomech/netting.hpp"

namespace repomech {

// Directed second-leg collateral flow graph over agents; at most one edge
// per ordered pair.
struct FlowNetwork {
    std::vector<AgentId> nodes;
    std::vector<NettedEdge> edges;

    bool has_node(const AgentId& a) const {
        return std::binary_search(nodes.begin(), nodes.end(), a, id_less);
    }
};

inline FlowNetwork build_flow_network(std::vector<NettedEdge> edges) {
    FlowNetwork net;
    for (const auto& e : edges) {
        net.nodes.push_back(e.from);
        net.nodes.push_back(e.to);
    }
    std::sort(net.nodes.begin(), net.nodes.end(), id_less);
    net.nodes.erase(std::unique(net.nodes.begin(), net.nodes.end()), net.nodes.end());
    std::sort(edges.begin(), edges.end(), [](const NettedEdge& a, const NettedEdge& b) {
        if (a.from != b.from) return id_less(a.from, b.from);
        return id_less(a.to, b.to);
    });
    net.edges = std::move(edges);
    return net;
}

// Second-leg T outflow minus inflow for one agent.
inline Quantity net_position(const FlowNetwork& net, const AgentId& agent) {
    if (!net.has_node(agent)) raise(Errc::unknown_agent, agent);
    Quantity q = 0;
    for (const auto& e : net.edges) {
        if (e.from == agent) q += e.qty;
        if (e.to == agent) q -= e.qty;
    }
    return q;
}

inline std::map<AgentId, Quantity> net_positions(const FlowNetwork& net) {
    std::map<AgentId, Quantity> out;
    for (const auto& a : net.nodes) out[a] = 0;
    for (const auto& e : net.edges) {
        out[e.from] += e.qty;
        out[e.to] -= e.qty;
    }
    return out;
}

}  // namespace repomech
