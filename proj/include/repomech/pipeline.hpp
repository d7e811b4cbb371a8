#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repomech/book_io.hpp"
#include "repomech/ccp.hpp"
#include "repomech/json_report.hpp"

namespace repomech {

struct PipelineConfig {
    SplitPolicy policy;
    EndNodePolicy end_node_policy = EndNodePolicy::secured_financing;
    Money fmv_adjustment;
    std::optional<Price> p_t_mark;  // market collateral price, haircut display only
    std::optional<SlrState> slr;
    std::optional<Money> ccp_fee_per_unit;
    std::vector<NonperformanceEvent> scenario;
};

// Everything the pipeline derives from one validated book. Pure value
// data; identical inputs give identical bundles.
struct PipelineResult {
    ValidatedBook book;
    std::vector<NettedEdge> netted;
    FlowNetwork network;
    TradeFlowNetwork tfn;
    Decomposition decomposition;
    Decomposition first_leg_mirror;
    PositionMap positions;
    CcpBook ccp;
    std::optional<ScenarioState> scenario;
};

inline PipelineResult run_pipeline(std::vector<RepoTrade> trades, const PipelineConfig& config) {
    PipelineResult r;
    r.book = validate_book(std::move(trades));
    r.netted = bilateral_net(r.book);
    r.network = build_flow_network(r.netted);
    r.tfn = split_nodes(r.network, config.policy);
    r.decomposition = decompose(r.tfn);
    r.first_leg_mirror = mirror_first_leg(r.decomposition);
    r.positions = build_positions(r.decomposition);
    if (config.p_t_mark)
        for (auto& [agent, pos] : r.positions) pos.p_t_mark = config.p_t_mark;
    r.ccp = central_clear(r.tfn);
    if (!config.scenario.empty()) {
        ScenarioState state(r.decomposition);
        for (const auto& ev : config.scenario) state.apply(ev);
        r.scenario = std::move(state);
    }
    return r;
}

// ---- accounting & comparison reports -------------------------------------

struct AgentAccountingRow {
    AgentId agent;
    BalanceSheetDelta pre_reform;   // matched volume only
    BalanceSheetDelta post_reform;
    BalanceSheetDelta repomech;
    std::optional<SlrResult> slr_before;
    std::optional<SlrResult> slr_after;  // repomech d_assets applied
};

inline std::vector<AgentAccountingRow> accounting_report(const PipelineResult& r,
                                                         const PipelineConfig& config) {
    std::vector<AgentAccountingRow> rows;
    for (const auto& agent : r.book.agents()) {
        AgentAccountingRow row;
        row.agent = agent;
        const auto it = r.positions.find(agent);
        const AgentPosition pos = it == r.positions.end() ? AgentPosition{} : it->second;
        row.pre_reform = impact_pre_reform(
            pos, detail::capped_fmv(pos.matched.net_second_leg_inflow(), config.fmv_adjustment));
        row.post_reform = impact_post_reform(pos);
        row.repomech = impact_repomech(pos, config.end_node_policy, config.fmv_adjustment);
        if (config.slr) {
            row.slr_before = slr_check(*config.slr, Money{});
            row.slr_after = slr_check(*config.slr, row.repomech.d_assets);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json accounting_report_json(const std::vector<AgentAccountingRow>& rows,
                                   const PipelineConfig& config) {
    Json agents = Json::array();
    for (const auto& row : rows) {
        Json entry{{"agent", row.agent},
                   {"pre_reform", to_json(row.pre_reform)},
                   {"post_reform", to_json(row.post_reform)},
                   {"repomech", to_json(row.repomech)}};
        if (row.slr_before) {
            auto fmt = [](const SlrResult& s) {
                return Json{{"ratio", s.ratio.to_string()},
                            {"ratio_approx", s.ratio.to_double()},
                            {"feasible", s.feasible}};
            };
            entry["slr_before"] = fmt(*row.slr_before);
            entry["slr_after"] = fmt(*row.slr_after);
        }
        agents.push_back(std::move(entry));
    }
    return Json{{"end_node_policy", end_node_policy_name(config.end_node_policy)},
                {"fmv_adjustment", config.fmv_adjustment.to_string()},
                {"agents", agents}};
}

inline std::string accounting_report_text(const std::vector<AgentAccountingRow>& rows,
                                          const PositionMap& positions) {
    std::vector<std::vector<std::string>> table;
    table.push_back({"agent", "regime", "dA", "dL"});
    for (const auto& row : rows) {
        for (const BalanceSheetDelta* d : {&row.pre_reform, &row.post_reform, &row.repomech})
            table.push_back(
                {row.agent, d->regime, d->d_assets.to_string(), d->d_liabilities.to_string()});
        if (row.slr_before) {
            table.push_back({row.agent, "slr before/after",
                             row.slr_before->ratio.to_string() +
                                 (row.slr_before->feasible ? " ok" : " breach"),
                             row.slr_after->ratio.to_string() +
                                 (row.slr_after->feasible ? " ok" : " breach")});
        }
    }
    std::string out = render_table(table);

    // Haircut display: total first-leg discount below the market mark on
    // each agent's lent volume. Never part of any delta.
    std::vector<std::vector<std::string>> haircuts;
    haircuts.push_back({"agent", "lent qty", "haircut vs p_T"});
    for (const auto& row : rows) {
        const auto it = positions.find(row.agent);
        if (it == positions.end() || !it->second.p_t_mark) continue;
        const LegVolumes t = it->second.total();
        if (t.qty_lent == 0) continue;
        const Money discount = *it->second.p_t_mark * t.qty_lent - t.m1_paid;
        haircuts.push_back({row.agent, std::to_string(t.qty_lent), discount.to_string()});
    }
    if (haircuts.size() > 1) out += "\n" + render_table(haircuts);
    return out;
}

struct CcpComparisonReport {
    std::vector<ClearingComparisonRow> rows;
    bool all_hold = true;
    std::map<AgentId, Money> fee_cost;  // per-unit fee on volume novated to the CCP
};

inline CcpComparisonReport ccp_comparison(const PipelineResult& r, const PipelineConfig& config) {
    CcpComparisonReport report;
    report.rows =
        check_clearing_dominance(r.tfn, r.decomposition, config.end_node_policy, config.fmv_adjustment);
    for (const auto& row : report.rows) report.all_hold = report.all_hold && row.holds;
    if (config.ccp_fee_per_unit) {
        for (const auto& [agent, pos] : r.ccp.positions) {
            const Quantity cleared = pos.matched.qty_lent + pos.lent_excess.qty_lent +
                                     pos.borrowed_excess.qty_borrowed;
            report.fee_cost[agent] = *config.ccp_fee_per_unit * cleared;
        }
    }
    return report;
}

inline Json ccp_comparison_json(const CcpComparisonReport& report, const PipelineResult& r) {
    Json rows = Json::array();
    for (const auto& row : report.rows) {
        Json entry{{"agent", row.agent},
                   {"repomech_d_assets", row.repomech_d_assets.to_string()},
                   {"ccp_d_assets", row.ccp_d_assets.to_string()},
                   {"holds", row.holds}};
        if (!report.fee_cost.empty())
            entry["ccp_fee_cost"] = report.fee_cost.at(row.agent).to_string();
        rows.push_back(std::move(entry));
    }
    return Json{{"agents", rows},
                {"netting_weakly_lower", report.all_hold},
                {"ccp_t_position", r.ccp.ccp_t_position()},
                {"ccp_m_position", r.ccp.ccp_m_position().to_string()}};
}

inline std::string ccp_comparison_text(const CcpComparisonReport& report) {
    std::vector<std::vector<std::string>> table;
    table.push_back({"agent", "repomech dA", "ccp dA", "holds"});
    for (const auto& row : report.rows)
        table.push_back({row.agent, row.repomech_d_assets.to_string(),
                         row.ccp_d_assets.to_string(), row.holds ? "yes" : "NO"});
    std::string out = render_table(table);
    if (!report.fee_cost.empty()) {
        std::vector<std::vector<std::string>> fees;
        fees.push_back({"agent", "ccp fee cost"});
        for (const auto& [agent, cost] : report.fee_cost)
            fees.push_back({agent, cost.to_string()});
        out += "\n" + render_table(fees);
    }
    return out;
}

// Serialized stage outputs; the bundle a `run` invocation writes to disk.
inline std::map<std::string, std::string> report_bundle(const PipelineResult& r,
                                                        const PipelineConfig& config) {
    std::map<std::string, std::string> files;
    auto dump = [](const Json& j) { return j.dump(2) + "\n"; };

    files["netted_edges.json"] = dump(netted_edges_json(r.netted));
    files["tfn.json"] = dump(tfn_json(r.tfn));
    files["assignment.json"] = dump(assignment_json(assignment_from_tfn(r.tfn)));
    files["decomposition.json"] = dump(decomposition_json(r.decomposition));
    files["first_leg_mirror.json"] = dump(decomposition_json(r.first_leg_mirror));
    files["contracts.json"] = dump(contracts_json(r.decomposition));

    const auto acct = accounting_report(r, config);
    files["accounting.json"] = dump(accounting_report_json(acct, config));
    files["accounting.txt"] = accounting_report_text(acct, r.positions);

    const auto comparison = ccp_comparison(r, config);
    files["ccp_comparison.json"] = dump(ccp_comparison_json(comparison, r));
    files["ccp_comparison.txt"] = ccp_comparison_text(comparison);

    std::string structures;
    for (const auto& c : r.decomposition.chains) structures += render_structure(c) + "\n";
    for (const auto& c : r.decomposition.cycles) structures += render_structure(c) + "\n";
    for (const auto& c : r.first_leg_mirror.chains) structures += render_structure(c) + "\n";
    for (const auto& c : r.first_leg_mirror.cycles) structures += render_structure(c) + "\n";
    files["structures.txt"] = structures;

    std::string contracts_text;
    for (const auto& c : r.decomposition.chains)
        contracts_text += render_contract(net_obligations(c)) + "\n";
    for (const auto& c : r.decomposition.cycles)
        contracts_text += render_contract(net_obligations(c)) + "\n";
    files["contracts.txt"] = contracts_text;

    if (r.scenario) {
        files["scenario_log.json"] = dump(scenario_log_json(*r.scenario));
        std::string log_text;
        for (const auto& step : r.scenario->log()) {
            log_text += "event: " + step.event.node.label() + " fails to send " +
                        object_name(step.event.object) + " on " + step.terminated + "\n";
            if (step.final_default) {
                log_text += "  final default (bilateral contract)\n";
            } else {
                for (const auto& child : step.children) {
                    const Structure* s = r.scenario->find(child);
                    log_text += "  " + (s ? render_structure(*s) : child) + "\n";
                }
            }
        }
        files["scenario_log.txt"] = log_text;
    }
    return files;
}

}  // namespace repomech
