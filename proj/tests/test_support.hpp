#pragma once

#include <string>
#include <vector>

#include "repomech/repomech.hpp"

namespace repomech::test {

inline std::string fixture_path(const std::string& name) {
    return std::string(REPOMECH_FIXTURE_DIR) + "/" + name;
}

inline std::vector<RepoTrade> example_book_trades() { return load_book(fixture_path("example_book.csv")); }

inline ExplicitAssignment example_assignment() {
    return parse_assignment_json(read_file(fixture_path("example_assignment.json")));
}

inline Money money(const char* s) { return Money::parse(s); }

// Pipeline stages on the bundled example book with its pinned assignment.
struct WorkedExample {
    ValidatedBook book;
    std::vector<NettedEdge> netted;
    FlowNetwork network;
    TradeFlowNetwork tfn;
    Decomposition decomposition;

    static WorkedExample make() {
        WorkedExample f;
        f.book = validate_book(example_book_trades());
        f.netted = bilateral_net(f.book);
        f.network = build_flow_network(f.netted);
        f.tfn = split_nodes(f.network, SplitPolicy::explicit_from(example_assignment()));
        f.decomposition = decompose(f.tfn);
        return f;
    }
};

inline const Structure& find_structure(const Decomposition& d, const std::string& id) {
    for (const auto& c : d.chains)
        if (c.id == id) return c;
    for (const auto& c : d.cycles)
        if (c.id == id) return c;
    throw std::runtime_error("no structure " + id);
}

// Path signature "MM_g>BT_f>..." for order-insensitive chain comparison.
inline std::string path_of(const Structure& st) {
    std::string out;
    for (const auto& n : st.nodes) {
        if (!out.empty()) out += ">";
        out += n.label();
    }
    return out;
}

inline std::string moneys_of(const Structure& st) {
    std::string out;
    for (const auto& e : st.edges) {
        if (!out.empty()) out += ",";
        out += e.m2.to_string();
    }
    return out;
}

inline NonperformanceEvent event(const std::string& structure, const std::string& node,
                                 NonperformanceEvent::Object object) {
    NonperformanceEvent ev;
    ev.structure_id = structure;
    ev.node = parse_split_node(node);
    ev.object = object;
    return ev;
}

// Book with independently random per-trade prices, including two-way
// pairs. Netted edges can carry money against their own direction;
// exercises the signed-money paths the market-style generator avoids.
inline std::vector<RepoTrade> random_priced_book(std::uint64_t seed, int n_agents, int n_trades) {
    std::mt19937_64 rng(seed);
    std::vector<RepoTrade> trades;
    for (int i = 0; i < n_trades; ++i) {
        const int lender = static_cast<int>(rng() % n_agents);
        int borrower = static_cast<int>(rng() % (n_agents - 1));
        if (borrower >= lender) ++borrower;
        RepoTrade t;
        t.trade_id = "t" + std::to_string(i + 1);
        t.lender = agent_name(lender);
        t.borrower = agent_name(borrower);
        t.p1 = Money::from_raw(100 + static_cast<std::int64_t>(rng() % 1'000'000));
        t.p2 = Money::from_raw(static_cast<std::int64_t>(rng() % 1'200'000));
        t.qty = 1 + static_cast<Quantity>(rng() % 10);
        trades.push_back(std::move(t));
    }
    return trades;
}

}  // namespace repomech::test
