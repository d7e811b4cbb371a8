#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "repomech/decomposition.hpp"

namespace repomech {

// Net flow of one node on one structure; positive = the node sends.
struct NetObligation {
    SplitNode node;
    Quantity t_net = 0;
    Money m_net;
};

enum class ContractStatus { active, terminated, defaulted };

struct ReplacementContract {
    std::string structure_id;
    std::vector<NetObligation> obligations;
    ContractStatus status = ContractStatus::active;
};

// Per-node net flows over the structure's edges on its settlement leg.
// Zero-sum in both objects by construction.
inline ReplacementContract net_obligations(const Structure& st) {
    std::map<SplitNode, NetObligation> acc;
    for (const auto& n : st.nodes) acc[n] = NetObligation{n, 0, Money{}};
    for (const auto& e : st.edges) {
        const Money m = edge_money(st, e);
        if (st.leg == Leg::second) {
            acc[e.from].t_net += e.qty;  // sends T
            acc[e.to].t_net -= e.qty;
            acc[e.to].m_net += m;  // pays the second-leg money
            acc[e.from].m_net -= m;
        } else {
            acc[e.to].t_net += e.qty;  // first leg: T runs against the edge
            acc[e.from].t_net -= e.qty;
            acc[e.from].m_net += m;
            acc[e.to].m_net -= m;
        }
    }
    ReplacementContract out;
    out.structure_id = st.id;
    for (const auto& n : st.nodes) out.obligations.push_back(acc[n]);
    return out;
}

struct NonperformanceEvent {
    std::string structure_id;
    SplitNode node;
    enum class Object { T, M } object = Object::M;
};

inline const char* object_name(NonperformanceEvent::Object o) {
    return o == NonperformanceEvent::Object::T ? "T" : "M";
}

namespace detail {

// Index of the structure edge on which `node` owes the unsent object.
// For money the borrower-pays direction is preferred; an edge whose money
// runs against its direction can put the obligation on the T-sender side.
inline std::size_t owed_edge(const Structure& st, const SplitNode& node,
                             NonperformanceEvent::Object object) {
    const bool second = st.leg == Leg::second;
    std::size_t in_edge = st.edges.size();
    std::size_t out_edge = st.edges.size();
    for (std::size_t i = 0; i < st.edges.size(); ++i) {
        const auto& e = st.edges[i];
        const bool sends_t = second ? e.from == node : e.to == node;
        const bool receives_t = second ? e.to == node : e.from == node;
        if (sends_t) out_edge = i;
        if (receives_t) in_edge = i;
    }
    if (object == NonperformanceEvent::Object::T) {
        if (out_edge == st.edges.size())
            raise(Errc::invalid_event, node.label() + " sends no collateral on " + st.id);
        return out_edge;
    }
    const auto money = [&](std::size_t i) { return edge_money(st, st.edges[i]); };
    if (in_edge != st.edges.size() && money(in_edge) > Money{}) return in_edge;
    if (out_edge != st.edges.size() && money(out_edge) < Money{}) return out_edge;
    raise(Errc::invalid_event, node.label() + " owes no money on " + st.id);
}

}  // namespace detail

inline bool valid_event(const Structure& st, const NonperformanceEvent& ev) {
    const auto contract = net_obligations(st);
    for (const auto& ob : contract.obligations) {
        if (!(ob.node == ev.node)) continue;
        if (ev.object == NonperformanceEvent::Object::T) return ob.t_net > 0;
        return ob.m_net > Money{};
    }
    return false;
}

// Decomposes a structure after `ev.node` fails to send its net obligation.
// The edge on which the failing node owed the object under the initial
// contracts is pulled out as a recovered bilateral (always the last child,
// suffix "c" on a chain, "b" on a cycle); the remaining edges re-form as
// one or two chains with flows unchanged. A bilateral structure cannot be
// decomposed further: the caller records a final default instead.
inline std::vector<Structure> simulate_nonperformance(const Structure& st,
                                                      const NonperformanceEvent& ev) {
    if (!valid_event(st, ev))
        raise(Errc::invalid_event,
              ev.node.label() + " has no outgoing " + object_name(ev.object) + " obligation on " + st.id);
    if (st.is_bilateral())
        raise(Errc::invalid_event, st.id + " is bilateral; nonperformance is a final default");

    const std::size_t k = detail::owed_edge(st, ev.node, ev.object);

    std::vector<Structure> children;
    auto make_chain = [&](std::vector<StructureEdge> edges) {
        Structure c;
        c.kind = StructureKind::chain;
        c.leg = st.leg;
        c.qty = st.qty;
        for (const auto& e : edges) c.nodes.push_back(e.from);
        c.nodes.push_back(edges.back().to);
        c.edges = std::move(edges);
        return c;
    };

    if (st.kind == StructureKind::chain) {
        if (k > 0)
            children.push_back(
                make_chain({st.edges.begin(), st.edges.begin() + static_cast<long>(k)}));
        if (k + 1 < st.edges.size())
            children.push_back(
                make_chain({st.edges.begin() + static_cast<long>(k) + 1, st.edges.end()}));
    } else {
        std::vector<StructureEdge> opened;
        for (std::size_t i = 1; i < st.edges.size(); ++i)
            opened.push_back(st.edges[(k + i) % st.edges.size()]);
        if (!opened.empty()) children.push_back(make_chain(std::move(opened)));
    }
    children.push_back(make_chain({st.edges[k]}));  // recovered initial trade

    char suffix = 'a';
    for (auto& c : children) c.id = st.id + std::string(1, suffix++);
    return children;
}

// Margin escrow adjustment per node: net collateral exposure times the
// assumed VAR move (price change plus vol_coeff * volatility change).
// Positive = the node pays escrow. Interior chain nodes and all cycle
// nodes net to zero exposure and owe nothing.
inline std::map<SplitNode, Money> margin_requirements(const Structure& st, Money delta_pt,
                                                      Money delta_vol, Money vol_coeff) {
    // 4dp x 4dp product rounded half-even back to 4dp.
    auto mul4 = [](Money a, Money b) {
        __int128 p = static_cast<__int128>(a.raw()) * b.raw();
        const bool neg = p < 0;
        if (neg) p = -p;
        __int128 q = p / Money::scale;
        const __int128 r = p % Money::scale;
        if (2 * r > Money::scale || (2 * r == Money::scale && (q % 2) != 0)) ++q;
        if (q > INT64_MAX) raise(Errc::overflow, "margin product out of range");
        return Money::from_raw(static_cast<std::int64_t>(neg ? -q : q));
    };
    const Money var_move = delta_pt + mul4(vol_coeff, delta_vol);
    std::map<SplitNode, Money> out;
    for (const auto& ob : net_obligations(st).obligations)
        out[ob.node] = var_move * ob.t_net;
    return out;
}

// A default scenario: ordered nonperformance events applied to the live
// structure set. Terminated structures are replaced by their children;
// bilateral failures become final defaults. Defaulted bilaterals stay in
// the books for conservation accounting.
struct ScenarioStep {
    NonperformanceEvent event;
    std::string terminated;
    std::vector<std::string> children;
    bool final_default = false;
};

class ScenarioState {
public:
    explicit ScenarioState(const Decomposition& d) {
        for (const auto& c : d.chains) live_.push_back(c);
        for (const auto& c : d.cycles) live_.push_back(c);
    }

    const std::vector<Structure>& live() const { return live_; }
    const std::vector<Structure>& defaulted() const { return defaulted_; }
    const std::vector<ScenarioStep>& log() const { return log_; }

    const Structure* find(const std::string& id) const {
        for (const auto& s : live_)
            if (s.id == id) return &s;
        return nullptr;
    }

    ScenarioStep apply(const NonperformanceEvent& ev) {
        const auto it = std::find_if(live_.begin(), live_.end(),
                                     [&](const Structure& s) { return s.id == ev.structure_id; });
        if (it == live_.end()) raise(Errc::invalid_event, "no live structure " + ev.structure_id);
        ScenarioStep step;
        step.event = ev;
        step.terminated = ev.structure_id;
        if (it->is_bilateral()) {
            if (!valid_event(*it, ev))
                raise(Errc::invalid_event, ev.node.label() + " owes nothing on " + ev.structure_id);
            step.final_default = true;
            defaulted_.push_back(std::move(*it));
            live_.erase(it);
        } else {
            auto children = simulate_nonperformance(*it, ev);
            live_.erase(it);
            for (auto& c : children) {
                step.children.push_back(c.id);
                live_.push_back(std::move(c));
            }
        }
        log_.push_back(step);
        return step;
    }

private:
    std::vector<Structure> live_;
    std::vector<Structure> defaulted_;
    std::vector<ScenarioStep> log_;
};

inline PairFlowMap pair_flows(const ScenarioState& state) {
    PairFlowMap map;
    auto add = [&](const Structure& st) {
        for (const auto& e : st.edges)
            detail::accumulate_pair_flow(map, e.from.parent, e.to.parent, e.qty, e.m2, e.m1);
    };
    for (const auto& s : state.live()) add(s);
    for (const auto& s : state.defaulted()) add(s);
    detail::prune_zero_flows(map);
    return map;
}

}  // namespace repomech
