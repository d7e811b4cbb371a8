#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repomech/decomposition.hpp"

namespace repomech {

// Money and collateral totals for one side of an agent's book. "Lent"
// volume is collateral the agent sends at the second leg (it paid m1 and
// collects m2); "borrowed" volume is the reverse.
struct LegVolumes {
    Quantity qty_lent = 0;
    Quantity qty_borrowed = 0;
    Money m1_paid;      // first-leg money out on lent volume
    Money m1_received;  // first-leg money in on borrowed volume
    Money m2_received;  // second-leg money in on lent volume
    Money m2_paid;      // second-leg money out on borrowed volume

    Money first_leg_margin() const { return m1_received - m1_paid; }
    Money net_second_leg_inflow() const { return m2_received - m2_paid; }
};

// An agent's volumes partitioned by its child-node roles.
struct AgentPosition {
    AgentId agent;
    LegVolumes matched;          // BT child
    LegVolumes lent_excess;      // MM child
    LegVolumes borrowed_excess;  // RM child
    std::optional<Price> p_t_mark;  // market collateral price, haircut display only

    LegVolumes total() const {
        LegVolumes t;
        for (const LegVolumes* v : {&matched, &lent_excess, &borrowed_excess}) {
            t.qty_lent += v->qty_lent;
            t.qty_borrowed += v->qty_borrowed;
            t.m1_paid += v->m1_paid;
            t.m1_received += v->m1_received;
            t.m2_received += v->m2_received;
            t.m2_paid += v->m2_paid;
        }
        return t;
    }
};

using PositionMap = std::map<AgentId, AgentPosition>;

namespace detail {

inline LegVolumes& bucket(AgentPosition& pos, Role role) {
    switch (role) {
        case Role::MM: return pos.lent_excess;
        case Role::RM: return pos.borrowed_excess;
        case Role::BT: return pos.matched;
    }
    return pos.matched;
}

inline void add_edge_to_positions(PositionMap& map, const SplitNode& from, const SplitNode& to,
                                  Quantity qty, Money m2, Money m1) {
    auto& tail = map[from.parent];
    tail.agent = from.parent;
    auto& tb = bucket(tail, from.role);
    tb.qty_lent += qty;
    tb.m1_paid += m1;
    tb.m2_received += m2;

    auto& head = map[to.parent];
    head.agent = to.parent;
    auto& hb = bucket(head, to.role);
    hb.qty_borrowed += qty;
    hb.m1_received += m1;
    hb.m2_paid += m2;
}

}  // namespace detail

inline PositionMap build_positions(const Decomposition& d) {
    PositionMap map;
    auto add = [&](const Structure& st) {
        for (const auto& e : st.edges)
            detail::add_edge_to_positions(map, e.from, e.to, e.qty, e.m2, e.m1);
    };
    for (const auto& c : d.chains) add(c);
    for (const auto& c : d.cycles) add(c);
    return map;
}

inline PositionMap build_positions(const TradeFlowNetwork& tfn) {
    PositionMap map;
    for (const auto& s : tfn.segments)
        detail::add_edge_to_positions(map, s.from, s.to, s.qty, s.m2, s.m1);
    return map;
}

// End-node treatment for excess volume under the netting mechanism: keep
// the trades as secured financings, or treat the first leg as a final
// sale with the second leg held as a derivative.
enum class EndNodePolicy { secured_financing, final_sale_derivative };

inline const char* end_node_policy_name(EndNodePolicy p) {
    return p == EndNodePolicy::secured_financing ? "secured-financing" : "final-sale-derivative";
}

struct DeltaComponent {
    std::string label;
    Money assets;
    Money liabilities;
};

struct BalanceSheetDelta {
    Money d_assets;
    Money d_liabilities;
    std::string regime;
    std::vector<DeltaComponent> components;

    void add(std::string label, Money assets, Money liabilities) {
        d_assets += assets;
        d_liabilities += liabilities;
        if (!assets.is_zero() || !liabilities.is_zero())
            components.push_back({std::move(label), assets, liabilities});
    }
};

namespace detail {

// Positive fair values sit in assets, negative ones in liabilities.
inline void post_signed(BalanceSheetDelta& delta, const std::string& label, Money value) {
    if (value >= Money{})
        delta.add(label, value, Money{});
    else
        delta.add(label, Money{}, -value);
}

// Fair value of the netted second leg: the contractual net money inflow
// plus any credit adjustment, never above the contractual bound.
inline Money capped_fmv(Money net_inflow, Money adjustment) {
    const Money candidate = net_inflow + adjustment;
    const Money bound = net_inflow.abs();
    return candidate < bound ? candidate : bound;
}

}  // namespace detail

// Final-sale treatment of a matched intermediary book: the collateral
// washes through, leaving the first-leg margin plus the second-leg fair
// value.
inline BalanceSheetDelta impact_pre_reform(const AgentPosition& pos, Money fmv2) {
    BalanceSheetDelta delta;
    delta.regime = "pre-reform-final-sale";
    delta.add("first-leg margin", pos.matched.first_leg_margin(), Money{});
    detail::post_signed(delta, "second-leg fmv", fmv2);
    return delta;
}

// Secured-financing treatment: every borrowing leg grosses up the balance
// sheet by the first-leg cash received against the second-leg repurchase
// liability; lending legs record nothing at the first leg.
inline BalanceSheetDelta impact_post_reform(const AgentPosition& pos) {
    BalanceSheetDelta delta;
    delta.regime = "post-reform-secured-financing";
    const LegVolumes t = pos.total();
    delta.add("first-leg cash received", t.m1_received, Money{});
    delta.add("second-leg repurchase obligation", Money{}, t.m2_paid);
    return delta;
}

// Netting-mechanism treatment. Matched volume settles money-only at the
// second leg, so its first leg is a final sale and the net second-leg
// money is held at fair value. Excess volume keeps repo form: under
// secured financing the borrowed excess grosses up as post-reform; under
// final-sale-derivative treatment only its margin reaches the balance
// sheet. Lent excess never records an asset change.
inline BalanceSheetDelta impact_repomech(const AgentPosition& pos, EndNodePolicy policy,
                                         Money fmv_adjustment = Money{}) {
    BalanceSheetDelta delta;
    delta.regime = std::string("repomech/") + end_node_policy_name(policy);
    delta.add("matched first-leg margin", pos.matched.first_leg_margin(), Money{});
    detail::post_signed(delta, "matched second-leg fmv",
                        detail::capped_fmv(pos.matched.net_second_leg_inflow(), fmv_adjustment));
    const auto& rm = pos.borrowed_excess;
    if (policy == EndNodePolicy::secured_financing) {
        delta.add("excess first-leg cash received", rm.m1_received, Money{});
        delta.add("excess second-leg repurchase obligation", Money{}, rm.m2_paid);
    } else {
        detail::post_signed(delta, "excess margin (final sale)", rm.m1_received - rm.m2_paid);
    }
    return delta;
}

// Supplementary leverage ratio state: capital over on-balance assets plus
// off-balance exposures, bounded below by `floor`.
struct SlrState {
    Money capital;
    Money assets;
    Money exposures;
    Money floor;  // e.g. 0.03 or 0.05
};

struct SlrResult {
    Rational ratio;
    bool feasible = false;
};

inline SlrResult slr_check(const SlrState& state, Money delta_assets) {
    if (state.assets < Money{} || state.exposures < Money{})
        raise(Errc::bad_config, "SLR assets and exposures must be non-negative");
    if (state.floor <= Money{} || state.floor >= Money::from_int(1))
        raise(Errc::bad_config, "SLR floor must lie in (0, 1)");
    const Money denom = state.assets + state.exposures + delta_assets;
    if (denom <= Money{})
        raise(Errc::non_positive_denominator, "assets + exposures + dA = " + denom.to_string());
    SlrResult r;
    r.ratio = Rational::of_money(state.capital, denom);
    r.feasible = r.ratio >= Rational(state.floor.raw(), Money::scale);
    return r;
}

}  // namespace repomech
