#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repomech/flow_network.hpp"

namespace repomech {

// Child-node role after splitting: MM = net second-leg T sender (net repo
// lender), RM = net receiver (net borrower), BT = balanced intermediary
// volume.
enum class Role { MM, BT, RM };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::MM: return "MM";
        case Role::BT: return "BT";
        case Role::RM: return "RM";
    }
    return "?";
}

struct SplitNode {
    AgentId parent;
    Role role = Role::BT;

    std::string label() const { return std::string(role_name(role)) + "_" + parent; }

    friend bool operator==(const SplitNode&, const SplitNode&) = default;
    friend bool operator<(const SplitNode& a, const SplitNode& b) {
        if (a.parent != b.parent) return id_less(a.parent, b.parent);
        return static_cast<int>(a.role) < static_cast<int>(b.role);
    }
};

// Flow between two child nodes; the per-parent-pair sum of segments
// reproduces the parent NettedEdge exactly in qty, m2 and m1.
struct EdgeSegment {
    SplitNode from;
    SplitNode to;
    Quantity qty = 0;
    Money m2;
    Money m1;
    std::vector<Allocation> allocations;
};

struct TradeFlowNetwork {
    std::vector<SplitNode> nodes;
    std::vector<EdgeSegment> segments;

    Quantity excess_of(const SplitNode& n) const {
        Quantity q = 0;
        for (const auto& s : segments) {
            if (s.from == n) q += s.qty;
            if (s.to == n) q -= s.qty;
        }
        return n.role == Role::RM ? -q : q;
    }
};

// Excess selection policy. The default detaches excess units from a
// node's edges in ascending order of the allocation's first-leg unit
// price, ties broken by ascending trade_id. An explicit assignment pins
// per-edge quantities instead (nodes it does not mention fall back to the
// ascending rule); it must cover each mentioned node's excess exactly.
struct ExplicitAssignment {
    // key: excess node; value: (counterparty agent, qty) list. For an MM
    // node of agent x an entry (y, q) takes q units of edge x->y; for an
    // RM node it takes q units of edge y->x.
    std::map<SplitNode, std::vector<std::pair<AgentId, Quantity>>> takes;
};

struct SplitPolicy {
    enum class Kind { ascending_first_leg_price, explicit_assignment };
    Kind kind = Kind::ascending_first_leg_price;
    ExplicitAssignment assignment;

    static SplitPolicy ascending() { return {}; }
    static SplitPolicy explicit_from(ExplicitAssignment a) {
        SplitPolicy p;
        p.kind = Kind::explicit_assignment;
        p.assignment = std::move(a);
        return p;
    }
};

namespace detail {

// Positive allocation multiset keyed by trade, used while carving an edge
// into segments.
struct AllocPool {
    // (trade_id, qty, p1, p2); qty > 0 entries only, sorted by (p1, trade_id).
    std::vector<Allocation> lots;

    static AllocPool positives_of(const std::vector<Allocation>& allocs) {
        AllocPool p;
        for (const auto& a : allocs)
            if (a.qty > 0) p.lots.push_back(a);
        std::sort(p.lots.begin(), p.lots.end(), [](const Allocation& a, const Allocation& b) {
            if (a.p1 != b.p1) return a.p1 < b.p1;
            return id_less(a.trade_id, b.trade_id);
        });
        return p;
    }

    Quantity total() const {
        Quantity q = 0;
        for (const auto& l : lots) q += l.qty;
        return q;
    }

    // Removes up to `want` units preferring trades present in `prefer`
    // (nullptr = no preference), in stored ascending order. Returns what
    // was taken; reduces `prefer` alongside when used.
    std::vector<Allocation> take(Quantity want, std::map<TradeId, Quantity>* prefer) {
        std::vector<Allocation> out;
        if (prefer) {
            for (auto& lot : lots) {
                if (want == 0) break;
                auto it = prefer->find(lot.trade_id);
                if (it == prefer->end() || it->second == 0) continue;
                const Quantity take_q = std::min({want, lot.qty, it->second});
                if (take_q == 0) continue;
                out.push_back(Allocation{lot.trade_id, take_q, lot.p1, lot.p2});
                lot.qty -= take_q;
                it->second -= take_q;
                want -= take_q;
            }
        }
        for (auto& lot : lots) {
            if (want == 0) break;
            if (lot.qty == 0) continue;
            const Quantity take_q = std::min(want, lot.qty);
            out.push_back(Allocation{lot.trade_id, take_q, lot.p1, lot.p2});
            lot.qty -= take_q;
            want -= take_q;
        }
        if (want != 0) raise(Errc::invalid_assignment, "allocation pool exhausted");
        lots.erase(std::remove_if(lots.begin(), lots.end(),
                                  [](const Allocation& a) { return a.qty == 0; }),
                   lots.end());
        return out;
    }
};

inline std::map<TradeId, Quantity> as_trade_map(const std::vector<Allocation>& allocs) {
    std::map<TradeId, Quantity> m;
    for (const auto& a : allocs) m[a.trade_id] += a.qty;
    return m;
}

inline void append_allocs(std::vector<Allocation>& dst, std::vector<Allocation> src) {
    for (auto& a : src) {
        auto it = std::find_if(dst.begin(), dst.end(),
                               [&](const Allocation& d) { return d.trade_id == a.trade_id; });
        if (it != dst.end())
            it->qty += a.qty;
        else
            dst.push_back(std::move(a));
    }
}

// Per-node excess selection: how many units (and which positive
// allocations) come off each incident edge.
struct EdgeTake {
    Quantity qty = 0;
    std::vector<Allocation> allocs;
};

// Selects `excess` units from the edges in `edge_idx` (all oriented so the
// node detaches from them), ascending by (allocation p1, trade_id), capped
// per edge by its net quantity.
inline std::map<std::size_t, EdgeTake> select_ascending(const std::vector<NettedEdge>& edges,
                                                        const std::vector<std::size_t>& edge_idx,
                                                        Quantity excess) {
    struct Lot {
        Price p1;
        TradeId trade_id;
        std::size_t edge;
        Quantity qty;
        Price p2;
    };
    std::vector<Lot> lots;
    for (std::size_t i : edge_idx)
        for (const auto& a : edges[i].allocations)
            if (a.qty > 0) lots.push_back(Lot{a.p1, a.trade_id, i, a.qty, a.p2});
    std::sort(lots.begin(), lots.end(), [](const Lot& a, const Lot& b) {
        if (a.p1 != b.p1) return a.p1 < b.p1;
        if (a.trade_id != b.trade_id) return id_less(a.trade_id, b.trade_id);
        return a.edge < b.edge;
    });
    std::map<std::size_t, Quantity> edge_left;
    for (std::size_t i : edge_idx) edge_left[i] = edges[i].qty;
    std::map<std::size_t, EdgeTake> takes;
    for (const auto& lot : lots) {
        if (excess == 0) break;
        const Quantity q = std::min({excess, lot.qty, edge_left[lot.edge]});
        if (q == 0) continue;
        auto& tk = takes[lot.edge];
        tk.qty += q;
        tk.allocs.push_back(Allocation{lot.trade_id, q, lot.p1, lot.p2});
        edge_left[lot.edge] -= q;
        excess -= q;
    }
    if (excess != 0) raise(Errc::malformed_tfn, "excess exceeds detachable volume");
    return takes;
}

}  // namespace detail

// Splits every agent into at most one excess child (MM on net outflow, RM
// on net inflow) and a BT child for whatever balanced volume remains, then
// carves each netted edge into child-pair segments. The carve pairs excess
// with balanced volume wherever quantities permit, so excess-to-excess
// segments appear only when the two selections overflow the edge.
inline TradeFlowNetwork split_nodes(const FlowNetwork& net, const SplitPolicy& policy) {
    const auto positions = net_positions(net);

    // Per-edge take for the tail node (MM side) and head node (RM side).
    std::vector<detail::EdgeTake> tail_take(net.edges.size());
    std::vector<detail::EdgeTake> head_take(net.edges.size());

    for (const auto& [agent, pos] : positions) {
        if (pos == 0) continue;
        const bool outflow = pos > 0;
        const Quantity excess = outflow ? pos : -pos;
        const SplitNode node{agent, outflow ? Role::MM : Role::RM};

        std::vector<std::size_t> incident;
        for (std::size_t i = 0; i < net.edges.size(); ++i) {
            const auto& e = net.edges[i];
            if ((outflow && e.from == agent) || (!outflow && e.to == agent)) incident.push_back(i);
        }

        std::map<std::size_t, detail::EdgeTake> takes;
        const auto explicit_it = policy.kind == SplitPolicy::Kind::explicit_assignment
                                     ? policy.assignment.takes.find(node)
                                     : policy.assignment.takes.end();
        if (explicit_it != policy.assignment.takes.end()) {
            Quantity covered = 0;
            for (const auto& [counterparty, q] : explicit_it->second) {
                if (q <= 0)
                    raise(Errc::invalid_assignment, node.label() + ": non-positive take");
                auto match = std::find_if(incident.begin(), incident.end(), [&](std::size_t i) {
                    return outflow ? net.edges[i].to == counterparty
                                   : net.edges[i].from == counterparty;
                });
                if (match == incident.end())
                    raise(Errc::invalid_assignment,
                          node.label() + ": no edge with counterparty " + counterparty);
                const std::size_t ei = *match;
                auto& tk = takes[ei];
                if (tk.qty + q > net.edges[ei].qty)
                    raise(Errc::invalid_assignment,
                          node.label() + ": take exceeds edge quantity vs " + counterparty);
                // Allocation choice within the edge follows the ascending rule.
                auto pool = detail::AllocPool::positives_of(net.edges[ei].allocations);
                pool.take(tk.qty, nullptr);  // skip units already taken
                detail::append_allocs(tk.allocs, pool.take(q, nullptr));
                tk.qty += q;
                covered += q;
            }
            if (covered != excess)
                raise(Errc::invalid_assignment,
                      node.label() + ": assignment covers " + std::to_string(covered) +
                          " of excess " + std::to_string(excess));
        } else {
            takes = detail::select_ascending(net.edges, incident, excess);
        }

        for (auto& [ei, tk] : takes) (outflow ? tail_take : head_take)[ei] = std::move(tk);
    }

    TradeFlowNetwork tfn;
    std::map<SplitNode, Quantity> node_volume;

    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const auto& e = net.edges[i];
        const Quantity qx = tail_take[i].qty;
        const Quantity qy = head_take[i].qty;
        const Quantity q_mr = std::max<Quantity>(0, qx + qy - e.qty);
        const Quantity q_mb = qx - q_mr;
        const Quantity q_br = qy - q_mr;
        const Quantity q_bb = e.qty - qx - qy + q_mr;

        auto pool = detail::AllocPool::positives_of(e.allocations);
        auto tail_want = detail::as_trade_map(tail_take[i].allocs);
        auto head_want = detail::as_trade_map(head_take[i].allocs);

        // Excess-to-excess units prefer trades both sides selected, then
        // the tail's picks; the tail-only and head-only groups follow; the
        // balanced remainder keeps everything left, including all
        // negative allocations.
        std::map<TradeId, Quantity> agreed;
        Quantity agreed_total = 0;
        for (const auto& [tid, tq] : tail_want) {
            auto it = head_want.find(tid);
            if (it == head_want.end()) continue;
            agreed[tid] = std::min(tq, it->second);
            agreed_total += agreed[tid];
        }
        auto decrement = [](std::map<TradeId, Quantity>& want, const Allocation& a) {
            auto it = want.find(a.trade_id);
            if (it != want.end()) it->second = std::max<Quantity>(0, it->second - a.qty);
        };
        std::vector<Allocation> a_mr = pool.take(std::min(q_mr, agreed_total), &agreed);
        for (const auto& a : a_mr) {
            decrement(tail_want, a);
            decrement(head_want, a);
        }
        if (alloc_qty(a_mr) < q_mr)
            detail::append_allocs(a_mr, pool.take(q_mr - alloc_qty(a_mr), &tail_want));
        std::vector<Allocation> a_mb = pool.take(q_mb, &tail_want);
        std::vector<Allocation> a_br = pool.take(q_br, &head_want);

        // Whatever remains (leftover positives and the negative
        // allocations) is glued to the last nonempty group so no money is
        // dropped.
        std::vector<Allocation> residue;
        for (const auto& lot : pool.lots) residue.push_back(lot);
        for (const auto& a : e.allocations)
            if (a.qty < 0) residue.push_back(a);

        const SplitNode tail_excess{e.from, Role::MM};
        const SplitNode tail_bt{e.from, Role::BT};
        const SplitNode head_excess{e.to, Role::RM};
        const SplitNode head_bt{e.to, Role::BT};

        struct Group {
            SplitNode from, to;
            Quantity qty;
            std::vector<Allocation>* allocs;
        };
        std::vector<Allocation> a_bb;
        Group groups[4] = {
            {tail_bt, head_bt, q_bb, &a_bb},
            {tail_bt, head_excess, q_br, &a_br},
            {tail_excess, head_bt, q_mb, &a_mb},
            {tail_excess, head_excess, q_mr, &a_mr},
        };
        if (!residue.empty()) {
            for (auto& g : groups)
                if (g.qty > 0) {
                    detail::append_allocs(*g.allocs, residue);
                    break;
                }
        }
        for (auto& g : groups) {
            if (g.qty == 0) continue;
            EdgeSegment seg;
            seg.from = g.from;
            seg.to = g.to;
            seg.qty = g.qty;
            sort_allocations(*g.allocs);
            seg.allocations = std::move(*g.allocs);
            seg.m2 = alloc_m2(seg.allocations);
            seg.m1 = alloc_m1(seg.allocations);
            tfn.segments.push_back(std::move(seg));
            node_volume[g.from] += g.qty;
            node_volume[g.to] += g.qty;
        }
    }

    for (const auto& [node, vol] : node_volume)
        if (vol > 0) tfn.nodes.push_back(node);
    std::sort(tfn.nodes.begin(), tfn.nodes.end());
    std::sort(tfn.segments.begin(), tfn.segments.end(), [](const EdgeSegment& a, const EdgeSegment& b) {
        if (!(a.from == b.from)) return a.from < b.from;
        return a.to < b.to;
    });
    return tfn;
}

// Reconstructs the per-edge explicit assignment that reproduces `tfn`
// under SplitPolicy::explicit_from.
inline ExplicitAssignment assignment_from_tfn(const TradeFlowNetwork& tfn) {
    ExplicitAssignment out;
    std::map<std::pair<SplitNode, AgentId>, Quantity> acc;
    for (const auto& s : tfn.segments) {
        if (s.from.role == Role::MM) acc[{s.from, s.to.parent}] += s.qty;
        if (s.to.role == Role::RM) acc[{s.to, s.from.parent}] += s.qty;
    }
    for (const auto& [key, q] : acc) out.takes[key.first].push_back({key.second, q});
    return out;
}

}  // namespace repomech
