#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "repomech/split.hpp"

namespace repomech {

// Directed structure edge carrying a uniform chain/cycle quantity slice.
// m2 flows to->from (second leg), m1 from->to (first leg); both derive
// from the allocations.
struct StructureEdge {
    SplitNode from;
    SplitNode to;
    Quantity qty = 0;
    Money m2;
    Money m1;
    std::vector<Allocation> allocations;
};

enum class StructureKind { chain, cycle };
enum class Leg { second, first };

// A chain (open path, uniform quantity) or a cycle (closed loop of
// balanced nodes). Chains produced by decompose() run MM -> BT... -> RM;
// cascade decomposition can produce chains with BT endpoints. Edges keep
// the second-leg orientation; `leg` says which direction and money value
// the structure settles (first-leg mirrors reverse both flows).
struct Structure {
    std::string id;
    StructureKind kind = StructureKind::chain;
    Leg leg = Leg::second;
    std::vector<SplitNode> nodes;      // cycle: first node not repeated
    std::vector<StructureEdge> edges;  // cycle: edges.size() == nodes.size()
    Quantity qty = 0;

    bool is_bilateral() const { return kind == StructureKind::chain && edges.size() == 1; }
};

struct Decomposition {
    std::vector<Structure> chains;
    std::vector<Structure> cycles;
};

namespace detail {

// Mutable residual of one TFN segment during peeling.
struct ResidualSegment {
    SplitNode from;
    SplitNode to;
    Quantity qty = 0;
    std::vector<Allocation> allocations;

    // Sort key: cheapest positive allocation (first-leg price, trade id).
    std::pair<Price, TradeId> step_key() const {
        std::pair<Price, TradeId> best{Price::from_raw(INT64_MAX), TradeId{}};
        bool found = false;
        for (const auto& a : allocations) {
            if (a.qty <= 0) continue;
            std::pair<Price, TradeId> k{a.p1, a.trade_id};
            if (!found || k.first < best.first ||
                (k.first == best.first && id_less(k.second, best.second))) {
                best = k;
                found = true;
            }
        }
        return best;
    }

    // Removes `take` units: cheapest positive allocations first; a take of
    // the full residual carries every remaining allocation (and all the
    // netting residue) with it.
    StructureEdge slice(Quantity take) {
        StructureEdge out;
        out.from = from;
        out.to = to;
        out.qty = take;
        if (take == qty) {
            out.allocations = std::move(allocations);
            allocations.clear();
        } else {
            auto pool = AllocPool::positives_of(allocations);
            out.allocations = pool.take(take, nullptr);
            std::vector<Allocation> rest = pool.lots;
            for (const auto& a : allocations)
                if (a.qty < 0) rest.push_back(a);
            allocations = std::move(rest);
        }
        qty -= take;
        sort_allocations(out.allocations);
        sort_allocations(allocations);
        out.m2 = alloc_m2(out.allocations);
        out.m1 = alloc_m1(out.allocations);
        return out;
    }
};

}  // namespace detail

inline void check_tfn(const TradeFlowNetwork& tfn) {
    std::map<SplitNode, std::pair<Quantity, Quantity>> io;  // (in, out)
    for (const auto& s : tfn.segments) {
        if (s.qty <= 0) raise(Errc::malformed_tfn, "segment with non-positive quantity");
        io[s.from].second += s.qty;
        io[s.to].first += s.qty;
    }
    for (const auto& [node, v] : io) {
        switch (node.role) {
            case Role::BT:
                if (v.first != v.second)
                    raise(Errc::malformed_tfn, node.label() + " unbalanced: in " +
                                                   std::to_string(v.first) + ", out " +
                                                   std::to_string(v.second));
                break;
            case Role::MM:
                if (v.first != 0) raise(Errc::malformed_tfn, node.label() + " has inflow");
                break;
            case Role::RM:
                if (v.second != 0) raise(Errc::malformed_tfn, node.label() + " has outflow");
                break;
        }
    }
}

// Peels the TFN into chains (every unit of MM excess routed to an RM) and
// cycles (the balanced remainder). Deterministic: chains start from MM
// nodes in descending excess order (ties by parent id); each step follows
// the segment that reaches an RM if one exists, otherwise the one with
// the cheapest (first-leg price, trade id) key; chain quantity is the
// bottleneck residual along the walk. Loops met during a walk are peeled
// off as cycles immediately; remaining balanced flow is peeled into
// cycles starting from the smallest parent id.
inline Decomposition decompose(const TradeFlowNetwork& tfn) {
    check_tfn(tfn);

    std::vector<detail::ResidualSegment> residual;
    for (const auto& s : tfn.segments)
        residual.push_back(detail::ResidualSegment{s.from, s.to, s.qty, s.allocations});

    auto outgoing = [&](const SplitNode& n) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < residual.size(); ++i)
            if (residual[i].qty > 0 && residual[i].from == n) out.push_back(i);
        return out;
    };
    auto pick_step = [&](const SplitNode& n) -> std::size_t {
        const auto out = outgoing(n);
        std::size_t best = residual.size();
        bool best_rm = false;
        std::pair<Price, TradeId> best_key;
        for (std::size_t i : out) {
            const bool rm = residual[i].to.role == Role::RM;
            const auto key = residual[i].step_key();
            bool better;
            if (best == residual.size())
                better = true;
            else if (rm != best_rm)
                better = rm;
            else if (key.first != best_key.first)
                better = key.first < best_key.first;
            else if (key.second != best_key.second)
                better = id_less(key.second, best_key.second);
            else
                better = residual[i].to < residual[best].to;
            if (better) {
                best = i;
                best_rm = rm;
                best_key = key;
            }
        }
        if (best == residual.size()) raise(Errc::malformed_tfn, "walk stuck at " + n.label());
        return best;
    };

    Decomposition out;
    int chain_seq = 0;
    int cycle_seq = 0;

    auto extract = [&](const std::vector<std::size_t>& path, StructureKind kind) {
        Quantity q = INT64_MAX;
        for (std::size_t i : path) q = std::min(q, residual[i].qty);
        Structure st;
        st.kind = kind;
        st.qty = q;
        for (std::size_t i : path) {
            st.nodes.push_back(residual[i].from);
            st.edges.push_back(residual[i].slice(q));
        }
        if (kind == StructureKind::chain) {
            st.nodes.push_back(residual[path.back()].to);
            st.id = "chain-" + std::to_string(++chain_seq);
            out.chains.push_back(std::move(st));
        } else {
            st.id = "cycle-" + std::to_string(++cycle_seq);
            out.cycles.push_back(std::move(st));
        }
    };

    // Chain peeling.
    std::vector<std::pair<SplitNode, Quantity>> mm_nodes;
    for (const auto& n : tfn.nodes)
        if (n.role == Role::MM) mm_nodes.push_back({n, tfn.excess_of(n)});
    std::sort(mm_nodes.begin(), mm_nodes.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return id_less(a.first.parent, b.first.parent);
    });

    for (const auto& [mm, excess] : mm_nodes) {
        (void)excess;
        while (!outgoing(mm).empty()) {
            std::vector<std::size_t> walk;
            std::vector<SplitNode> visited{mm};
            SplitNode cur = mm;
            for (;;) {
                const std::size_t step = pick_step(cur);
                const SplitNode next = residual[step].to;
                const auto seen = std::find(visited.begin(), visited.end(), next);
                if (seen != visited.end()) {
                    // Peel the loop off as a cycle and resume from `next`.
                    const std::size_t at = static_cast<std::size_t>(seen - visited.begin());
                    walk.push_back(step);
                    extract(std::vector<std::size_t>(walk.begin() + at, walk.end()),
                            StructureKind::cycle);
                    walk.resize(at);
                    visited.resize(at + 1);
                    cur = next;
                    continue;
                }
                walk.push_back(step);
                visited.push_back(next);
                cur = next;
                if (cur.role == Role::RM) break;
            }
            extract(walk, StructureKind::chain);
        }
    }

    // Cycle peeling of the balanced remainder.
    for (;;) {
        SplitNode start;
        bool found = false;
        for (const auto& seg : residual) {
            if (seg.qty == 0) continue;
            if (!found || seg.from < start) {
                start = seg.from;
                found = true;
            }
        }
        if (!found) break;
        std::vector<std::size_t> walk;
        std::vector<SplitNode> visited{start};
        SplitNode cur = start;
        for (;;) {
            const std::size_t step = pick_step(cur);
            const SplitNode next = residual[step].to;
            const auto seen = std::find(visited.begin(), visited.end(), next);
            if (seen != visited.end()) {
                const std::size_t at = static_cast<std::size_t>(seen - visited.begin());
                walk.push_back(step);
                extract(std::vector<std::size_t>(walk.begin() + at, walk.end()),
                        StructureKind::cycle);
                break;
            }
            walk.push_back(step);
            visited.push_back(next);
            cur = next;
        }
    }

    return out;
}

// Recomputes every edge's money from its trade allocations (signed sums
// of quantity times leg price). decompose() already attaches money this
// way; re-attaching is idempotent.
inline Structure attach_money(Structure st) {
    for (auto& e : st.edges) {
        e.m2 = alloc_m2(e.allocations);
        e.m1 = alloc_m1(e.allocations);
    }
    return st;
}

// First-leg counterpart of a decomposition: identical topology and
// quantities, collateral and money directions reversed, money set to the
// first-leg values.
inline Decomposition mirror_first_leg(const Decomposition& d) {
    Decomposition out = d;
    auto flip = [](Structure& st) {
        st.id += "-first-leg";
        st.leg = Leg::first;
    };
    for (auto& c : out.chains) flip(c);
    for (auto& c : out.cycles) flip(c);
    return out;
}

// Money a structure edge settles on the structure's leg. Second-leg money
// flows against the edge direction, first-leg money along it.
inline Money edge_money(const Structure& st, const StructureEdge& e) {
    return st.leg == Leg::second ? e.m2 : e.m1;
}

inline PairFlowMap pair_flows(const TradeFlowNetwork& tfn) {
    PairFlowMap map;
    for (const auto& s : tfn.segments)
        detail::accumulate_pair_flow(map, s.from.parent, s.to.parent, s.qty, s.m2, s.m1);
    detail::prune_zero_flows(map);
    return map;
}

inline PairFlowMap pair_flows(const Decomposition& d) {
    PairFlowMap map;
    auto add = [&](const Structure& st) {
        for (const auto& e : st.edges)
            detail::accumulate_pair_flow(map, e.from.parent, e.to.parent, e.qty, e.m2, e.m1);
    };
    for (const auto& c : d.chains) add(c);
    for (const auto& c : d.cycles) add(c);
    detail::prune_zero_flows(map);
    return map;
}

}  // namespace repomech
