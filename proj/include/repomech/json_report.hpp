#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repomech/accounting.hpp"
#include "repomech/ccp.hpp"
#include "repomech/settlement.hpp"

namespace repomech {

using Json = nlohmann::ordered_json;

// ---- JSON encoders ------------------------------------------------------
// Money is carried as a decimal string so values stay exact in transit.

inline Json to_json(const Allocation& a) {
    return Json{{"trade_id", a.trade_id},
                {"qty", a.qty},
                {"first_leg_price", a.p1.to_string()},
                {"second_leg_price", a.p2.to_string()}};
}

inline Json allocations_json(const std::vector<Allocation>& allocs) {
    Json arr = Json::array();
    for (const auto& a : allocs) arr.push_back(to_json(a));
    return arr;
}

inline Json to_json(const NettedEdge& e) {
    return Json{{"from", e.from},
                {"to", e.to},
                {"qty", e.qty},
                {"m2", e.m2.to_string()},
                {"m1", e.m1.to_string()},
                {"allocations", allocations_json(e.allocations)}};
}

inline Json netted_edges_json(const std::vector<NettedEdge>& edges) {
    Json arr = Json::array();
    for (const auto& e : edges) arr.push_back(to_json(e));
    return Json{{"netted_edges", arr}};
}

inline Json to_json(const SplitNode& n) {
    return Json{{"label", n.label()}, {"parent", n.parent}, {"role", role_name(n.role)}};
}

inline Json to_json(const EdgeSegment& s) {
    return Json{{"from", s.from.label()},
                {"to", s.to.label()},
                {"qty", s.qty},
                {"m2", s.m2.to_string()},
                {"m1", s.m1.to_string()},
                {"allocations", allocations_json(s.allocations)}};
}

inline Json tfn_json(const TradeFlowNetwork& tfn) {
    Json nodes = Json::array();
    for (const auto& n : tfn.nodes) nodes.push_back(to_json(n));
    Json segments = Json::array();
    for (const auto& s : tfn.segments) segments.push_back(to_json(s));
    return Json{{"nodes", nodes}, {"segments", segments}};
}

inline Json to_json(const Structure& st) {
    Json nodes = Json::array();
    for (const auto& n : st.nodes) nodes.push_back(n.label());
    Json edges = Json::array();
    for (const auto& e : st.edges)
        edges.push_back(Json{{"from", e.from.label()},
                             {"to", e.to.label()},
                             {"qty", e.qty},
                             {"money", edge_money(st, e).to_string()},
                             {"m2", e.m2.to_string()},
                             {"m1", e.m1.to_string()},
                             {"allocations", allocations_json(e.allocations)}});
    return Json{{"id", st.id},
                {"kind", st.kind == StructureKind::chain ? "chain" : "cycle"},
                {"leg", st.leg == Leg::second ? "second" : "first"},
                {"qty", st.qty},
                {"nodes", nodes},
                {"edges", edges}};
}

inline Json decomposition_json(const Decomposition& d) {
    Json chains = Json::array();
    for (const auto& c : d.chains) chains.push_back(to_json(c));
    Json cycles = Json::array();
    for (const auto& c : d.cycles) cycles.push_back(to_json(c));
    return Json{{"chains", chains}, {"cycles", cycles}};
}

inline Json to_json(const ReplacementContract& contract) {
    Json obligations = Json::array();
    for (const auto& ob : contract.obligations)
        obligations.push_back(Json{{"node", ob.node.label()},
                                   {"t_net", ob.t_net},
                                   {"m_net", ob.m_net.to_string()}});
    const char* status = contract.status == ContractStatus::active
                             ? "active"
                             : contract.status == ContractStatus::terminated ? "terminated"
                                                                             : "defaulted";
    return Json{{"structure_id", contract.structure_id},
                {"status", status},
                {"obligations", obligations}};
}

inline Json contracts_json(const Decomposition& d) {
    Json arr = Json::array();
    for (const auto& c : d.chains) arr.push_back(to_json(net_obligations(c)));
    for (const auto& c : d.cycles) arr.push_back(to_json(net_obligations(c)));
    return Json{{"contracts", arr}};
}

inline Json to_json(const BalanceSheetDelta& delta) {
    Json components = Json::array();
    for (const auto& c : delta.components)
        components.push_back(Json{{"label", c.label},
                                  {"assets", c.assets.to_string()},
                                  {"liabilities", c.liabilities.to_string()}});
    return Json{{"regime", delta.regime},
                {"d_assets", delta.d_assets.to_string()},
                {"d_liabilities", delta.d_liabilities.to_string()},
                {"components", components}};
}

inline Json scenario_log_json(const ScenarioState& state) {
    Json steps = Json::array();
    for (const auto& step : state.log()) {
        Json children = Json::array();
        for (const auto& c : step.children) children.push_back(c);
        steps.push_back(Json{{"structure_id", step.event.structure_id},
                             {"node", step.event.node.label()},
                             {"object", object_name(step.event.object)},
                             {"terminated", step.terminated},
                             {"children", children},
                             {"final_default", step.final_default}});
    }
    Json live = Json::array();
    for (const auto& s : state.live()) live.push_back(to_json(s));
    Json defaulted = Json::array();
    for (const auto& s : state.defaulted()) defaulted.push_back(to_json(s));
    return Json{{"steps", steps}, {"live", live}, {"defaulted", defaulted}};
}

// ---- parsers for policy / scenario files --------------------------------

inline SplitNode parse_split_node(const std::string& label) {
    const auto sep = label.find('_');
    if (sep == std::string::npos || sep == label.size() - 1)
        raise(Errc::parse_error, "bad node label '" + label + "' (want ROLE_agent)");
    const std::string role = label.substr(0, sep);
    SplitNode n;
    n.parent = label.substr(sep + 1);
    if (role == "MM")
        n.role = Role::MM;
    else if (role == "BT")
        n.role = Role::BT;
    else if (role == "RM")
        n.role = Role::RM;
    else
        raise(Errc::parse_error, "bad node role '" + role + "'");
    return n;
}

// Assignment file: {"assignments": [{"node": "MM_g",
//                                    "takes": [{"counterparty": "f", "qty": 2}]}]}
inline ExplicitAssignment parse_assignment_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse_error, std::string("bad assignment JSON: ") + e.what());
    }
    ExplicitAssignment out;
    try {
        for (const auto& row : j.at("assignments")) {
            const SplitNode node = parse_split_node(row.at("node").get<std::string>());
            auto& takes = out.takes[node];
            for (const auto& take : row.at("takes"))
                takes.push_back({take.at("counterparty").get<std::string>(),
                                 take.at("qty").get<Quantity>()});
        }
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse_error, std::string("bad assignment JSON: ") + e.what());
    }
    return out;
}

inline Json assignment_json(const ExplicitAssignment& a) {
    Json rows = Json::array();
    for (const auto& [node, takes] : a.takes) {
        Json jt = Json::array();
        for (const auto& [agent, qty] : takes)
            jt.push_back(Json{{"counterparty", agent}, {"qty", qty}});
        rows.push_back(Json{{"node", node.label()}, {"takes", jt}});
    }
    return Json{{"assignments", rows}};
}

// Scenario file: {"events": [{"structure_id": "chain-7", "node": "BT_i",
//                             "object": "M"}]}
inline std::vector<NonperformanceEvent> parse_scenario_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse_error, std::string("bad scenario JSON: ") + e.what());
    }
    std::vector<NonperformanceEvent> events;
    try {
        for (const auto& row : j.at("events")) {
            NonperformanceEvent ev;
            ev.structure_id = row.at("structure_id").get<std::string>();
            ev.node = parse_split_node(row.at("node").get<std::string>());
            const std::string object = row.at("object").get<std::string>();
            if (object == "T")
                ev.object = NonperformanceEvent::Object::T;
            else if (object == "M")
                ev.object = NonperformanceEvent::Object::M;
            else
                raise(Errc::parse_error, "bad object '" + object + "' (want T or M)");
            events.push_back(std::move(ev));
        }
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse_error, std::string("bad scenario JSON: ") + e.what());
    }
    return events;
}

// ---- aligned text tables -------------------------------------------------

inline std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) return "";
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += "  ";
            out += row[i];
            if (i + 1 < row.size()) out += std::string(width[i] - row[i].size(), ' ');
        }
        out += "\n";
    }
    return out;
}

inline std::string render_structure(const Structure& st) {
    std::ostringstream out;
    out << (st.kind == StructureKind::chain ? "Chain " : "Cycle ") << st.id;
    if (st.leg == Leg::first) out << " (first leg)";
    out << ": ";
    const bool reversed = st.leg == Leg::first;
    for (std::size_t i = 0; i < st.edges.size(); ++i) {
        const auto& e = st.edges[i];
        if (i == 0) out << e.from.label();
        out << (reversed ? " <-[" : " -[") << e.qty << "T / " << edge_money(st, e).to_string()
            << "M]" << (reversed ? "- " : "-> ") << e.to.label();
    }
    if (st.kind == StructureKind::cycle) out << " (closed)";
    return out.str();
}

inline std::string render_contract(const ReplacementContract& contract) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"node", "T flow", "M flow"});
    auto flow = [](const std::string& amount, bool zero, bool in) {
        if (zero) return std::string("-");
        return amount + (in ? " - in" : " - out");
    };
    for (const auto& ob : contract.obligations) {
        const Quantity tq = ob.t_net < 0 ? -ob.t_net : ob.t_net;
        rows.push_back({ob.node.label(),
                        flow(std::to_string(tq), ob.t_net == 0, ob.t_net < 0),
                        flow(ob.m_net.abs().to_string(), ob.m_net.is_zero(), ob.m_net.is_negative())});
    }
    return "Net flows on " + contract.structure_id + "\n" + render_table(rows);
}

}  // namespace repomech
