#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "repomech/trade.hpp"

namespace repomech {

// Share of a netted edge attributed to one initial trade. `qty` is signed:
// trades running against the edge direction enter negatively. Prices are
// copied from the trade so money recomputes from allocations alone.
struct Allocation {
    TradeId trade_id;
    Quantity qty = 0;  // signed
    Price p1;
    Price p2;
};

inline Money alloc_m1(const std::vector<Allocation>& allocs) {
    Money m;
    for (const auto& a : allocs) m += a.p1 * a.qty;
    return m;
}

inline Money alloc_m2(const std::vector<Allocation>& allocs) {
    Money m;
    for (const auto& a : allocs) m += a.p2 * a.qty;
    return m;
}

inline Quantity alloc_qty(const std::vector<Allocation>& allocs) {
    Quantity q = 0;
    for (const auto& a : allocs) q += a.qty;
    return q;
}

// Net second-leg flow between an ordered agent pair. The edge points from
// the net second-leg sender of the collateral (the net repo lender side).
// m2 flows to->from, m1 flows from->to; both are signed sums over the
// allocations and may run against the edge direction on mixed pairs.
struct NettedEdge {
    AgentId from;
    AgentId to;
    Quantity qty = 0;  // > 0
    Money m2;
    Money m1;
    std::vector<Allocation> allocations;
};

inline void sort_allocations(std::vector<Allocation>& allocs) {
    std::sort(allocs.begin(), allocs.end(),
              [](const Allocation& a, const Allocation& b) { return id_less(a.trade_id, b.trade_id); });
}

// Nets all second-leg collateral flows per unordered agent pair into at
// most one directed edge. Pairs whose flows cancel exactly produce no
// edge.
inline std::vector<NettedEdge> bilateral_net(const ValidatedBook& book) {
    struct PairAcc {
        Quantity qty = 0;
        std::vector<Allocation> allocs;
    };
    auto pair_key = [](const AgentId& a, const AgentId& b) {
        return id_less(a, b) ? std::make_pair(a, b) : std::make_pair(b, a);
    };
    std::map<std::pair<AgentId, AgentId>, PairAcc> pairs;
    for (const auto& t : book.trades()) {
        auto key = pair_key(t.lender, t.borrower);
        auto& acc = pairs[key];
        // Signed relative to the canonical (key.first -> key.second) direction.
        const Quantity signed_qty = (t.lender == key.first) ? t.qty : -t.qty;
        acc.qty += signed_qty;
        acc.allocs.push_back(Allocation{t.trade_id, signed_qty, t.p1, t.p2});
    }
    std::vector<NettedEdge> edges;
    for (auto& [key, acc] : pairs) {
        if (acc.qty == 0) continue;
        NettedEdge e;
        if (acc.qty > 0) {
            e.from = key.first;
            e.to = key.second;
            e.allocations = std::move(acc.allocs);
        } else {
            e.from = key.second;
            e.to = key.first;
            e.allocations = std::move(acc.allocs);
            for (auto& a : e.allocations) a.qty = -a.qty;
        }
        e.qty = acc.qty > 0 ? acc.qty : -acc.qty;
        sort_allocations(e.allocations);
        e.m2 = alloc_m2(e.allocations);
        e.m1 = alloc_m1(e.allocations);
        edges.push_back(std::move(e));
    }
    std::sort(edges.begin(), edges.end(), [](const NettedEdge& a, const NettedEdge& b) {
        if (a.from != b.from) return id_less(a.from, b.from);
        return id_less(a.to, b.to);
    });
    return edges;
}

// Signed per-ordered-pair totals of (qty, m2, m1); the conservation
// identities compare these across pipeline stages.
struct PairFlow {
    Quantity qty = 0;
    Money m2;
    Money m1;

    friend bool operator==(const PairFlow&, const PairFlow&) = default;
};

using PairFlowMap = std::map<std::pair<AgentId, AgentId>, PairFlow>;

namespace detail {
inline void accumulate_pair_flow(PairFlowMap& map, const AgentId& from, const AgentId& to,
                                 Quantity qty, Money m2, Money m1) {
    if (id_less(from, to)) {
        auto& f = map[{from, to}];
        f.qty += qty;
        f.m2 += m2;
        f.m1 += m1;
    } else {
        auto& f = map[{to, from}];
        f.qty -= qty;
        f.m2 -= m2;
        f.m1 -= m1;
    }
}

inline void prune_zero_flows(PairFlowMap& map) {
    for (auto it = map.begin(); it != map.end();) {
        if (it->second == PairFlow{})
            it = map.erase(it);
        else
            ++it;
    }
}
}  // namespace detail

inline PairFlowMap pair_flows(const ValidatedBook& book) {
    PairFlowMap map;
    for (const auto& t : book.trades())
        detail::accumulate_pair_flow(map, t.lender, t.borrower, t.qty, t.p2 * t.qty, t.p1 * t.qty);
    detail::prune_zero_flows(map);
    return map;
}

inline PairFlowMap pair_flows(const std::vector<NettedEdge>& edges) {
    PairFlowMap map;
    for (const auto& e : edges) detail::accumulate_pair_flow(map, e.from, e.to, e.qty, e.m2, e.m1);
    detail::prune_zero_flows(map);
    return map;
}

}  // namespace repomech
