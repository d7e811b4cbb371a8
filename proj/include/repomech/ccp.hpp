#pragma once

#include <map>
#include <string>
#include <vector>

#include "repomech/accounting.hpp"

namespace repomech {

// Book after novating every trade to a central counterparty. Each agent's
// balanced volume nets to a single money settlement with the CCP; excess
// volume becomes a bilateral repo position against the CCP. Balanced
// collateral flows between dealers are extinguished.
struct CcpBook {
    AgentId ccp = "CCP";
    PositionMap positions;                  // same partition as the TFN
    std::map<AgentId, Money> matched_net_m2;  // positive: CCP pays the agent
    std::vector<EdgeSegment> extinguished;  // BT-to-BT segments netted away

    // The CCP's own net positions; both zero on a consistent book.
    Quantity ccp_t_position() const {
        Quantity q = 0;
        for (const auto& [agent, pos] : positions)
            q += pos.borrowed_excess.qty_borrowed - pos.lent_excess.qty_lent;
        return q;
    }
    Money ccp_m_position() const {
        Money m;
        for (const auto& [agent, net] : matched_net_m2) m -= net;
        for (const auto& [agent, pos] : positions)
            m += pos.borrowed_excess.m2_paid - pos.lent_excess.m2_received;
        return m;
    }
};

inline CcpBook central_clear(const TradeFlowNetwork& tfn) {
    CcpBook book;
    book.positions = build_positions(tfn);
    for (const auto& [agent, pos] : book.positions)
        book.matched_net_m2[agent] = pos.matched.net_second_leg_inflow();
    for (const auto& s : tfn.segments)
        if (s.from.role == Role::BT && s.to.role == Role::BT) book.extinguished.push_back(s);
    return book;
}

// Accounting under central clearing: matched volume is a first-leg final
// sale with the net money settlement against the CCP held at fair value;
// excess volume stays a secured financing against the CCP.
inline BalanceSheetDelta impact_central_clearing(const AgentId& agent, const CcpBook& book,
                                                 Money fmv_adjustment = Money{}) {
    BalanceSheetDelta delta;
    delta.regime = "central-clearing";
    const auto it = book.positions.find(agent);
    if (it == book.positions.end()) return delta;
    const AgentPosition& pos = it->second;
    delta.add("matched first-leg margin", pos.matched.first_leg_margin(), Money{});
    detail::post_signed(delta, "matched fmv vs CCP",
                        detail::capped_fmv(book.matched_net_m2.at(agent), fmv_adjustment));
    const auto& rm = pos.borrowed_excess;
    delta.add("excess first-leg cash received", rm.m1_received, Money{});
    delta.add("excess second-leg repurchase obligation", Money{}, rm.m2_paid);
    return delta;
}

struct ClearingComparisonRow {
    AgentId agent;
    Money repomech_d_assets;
    Money ccp_d_assets;
    bool holds = false;
};

// Per-agent comparison of first-leg asset impact: the netting mechanism
// against central clearing under a common fair-value convention.
inline std::vector<ClearingComparisonRow> check_clearing_dominance(const TradeFlowNetwork& tfn,
                                                       const Decomposition& d,
                                                       EndNodePolicy policy,
                                                       Money fmv_adjustment = Money{}) {
    const PositionMap positions = build_positions(d);
    const CcpBook ccp = central_clear(tfn);
    std::vector<ClearingComparisonRow> rows;
    std::vector<AgentId> agents;
    for (const auto& [agent, pos] : ccp.positions) agents.push_back(agent);
    std::sort(agents.begin(), agents.end(), id_less);
    for (const auto& agent : agents) {
        ClearingComparisonRow row;
        row.agent = agent;
        const auto it = positions.find(agent);
        const AgentPosition pos = it == positions.end() ? AgentPosition{} : it->second;
        row.repomech_d_assets = impact_repomech(pos, policy, fmv_adjustment).d_assets;
        row.ccp_d_assets = impact_central_clearing(agent, ccp, fmv_adjustment).d_assets;
        row.holds = row.repomech_d_assets <= row.ccp_d_assets;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace repomech
