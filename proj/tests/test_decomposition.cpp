#include <doctest.h>

#include <set>

#include "test_support.hpp"

using namespace repomech;
using repomech::test::WorkedExample;
using repomech::test::money;
using repomech::test::moneys_of;
using repomech::test::path_of;
using repomech::test::example_book_trades;

TEST_CASE("example book decomposes into the seven chains and one cycle") {
    const auto f = WorkedExample::make();
    REQUIRE(f.decomposition.chains.size() == 7);
    REQUIRE(f.decomposition.cycles.size() == 1);

    std::set<std::string> got;
    for (const auto& c : f.decomposition.chains)
        got.insert(path_of(c) + "|" + std::to_string(c.qty) + "|" + moneys_of(c));

    const std::set<std::string> expected = {
        "MM_k>RM_i|3|18.90",
        "MM_k>BT_g>RM_j|8|30.16,47.60",
        "MM_l>BT_g>RM_j|2|11.90,11.90",
        "MM_l>BT_g>RM_f|4|23.80,26.12",
        "MM_h>BT_i>RM_j|5|26.25,32.75",
        "MM_h>BT_f>RM_i|2|8.20,10.24",
        "MM_g>BT_f>BT_i>BT_g>RM_f|2|13.06,10.24,6.00,13.06",
    };
    CHECK(got == expected);

    const auto& cycle = f.decomposition.cycles.front();
    CHECK(cycle.qty == 2);
    CHECK(cycle.nodes.size() == 3);
    std::multiset<std::string> cycle_money;
    for (const auto& e : cycle.edges) cycle_money.insert(e.m2.to_string());
    CHECK(cycle_money == std::multiset<std::string>{"13.06", "10.24", "6.00"});
}

TEST_CASE("chain ids are stable") {
    const auto f = WorkedExample::make();
    CHECK(path_of(repomech::test::find_structure(f.decomposition, "chain-7")) ==
          "MM_g>BT_f>BT_i>BT_g>RM_f");
    CHECK(path_of(repomech::test::find_structure(f.decomposition, "chain-1")) == "MM_k>RM_i");
}

TEST_CASE("chain money re-attaches from the trade allocations") {
    const auto f = WorkedExample::make();
    const auto& chain2 = repomech::test::find_structure(f.decomposition, "chain-2");
    REQUIRE(path_of(chain2) == "MM_k>BT_g>RM_j");
    CHECK(chain2.edges[0].m2 == money("3.77") * 8);
    CHECK(chain2.edges[1].m2 == money("5.95") * 8);

    // Chain 5 edge 1 = 5 units at trade 1's second-leg price.
    const auto& chain4 = repomech::test::find_structure(f.decomposition, "chain-4");
    REQUIRE(path_of(chain4) == "MM_h>BT_i>RM_j");
    CHECK(chain4.edges[0].m2 == money("5.25") * 5);
    CHECK(chain4.edges[0].m2 == money("26.25"));
}

TEST_CASE("attach_money is how edges carry money, and is idempotent") {
    const auto f = WorkedExample::make();
    for (const auto& collection : {f.decomposition.chains, f.decomposition.cycles}) {
        for (const auto& st : collection) {
            const auto re = attach_money(st);
            for (std::size_t i = 0; i < st.edges.size(); ++i) {
                CHECK(re.edges[i].m2 == st.edges[i].m2);
                CHECK(re.edges[i].m1 == st.edges[i].m1);
            }
        }
    }
}

TEST_CASE("single-segment TFN decomposes to one bilateral chain") {
    const auto net = build_flow_network(
        bilateral_net(validate_book({RepoTrade{"1", "h", "f", money("3.00"), money("3.30"), 2}})));
    const auto d = decompose(split_nodes(net, SplitPolicy::ascending()));
    REQUIRE(d.chains.size() == 1);
    CHECK(d.cycles.empty());
    CHECK(d.chains[0].is_bilateral());
    CHECK(d.chains[0].qty == 2);
    CHECK(path_of(d.chains[0]) == "MM_h>RM_f");
}

TEST_CASE("decompose rejects an unbalanced TFN") {
    TradeFlowNetwork bad;
    const SplitNode a = parse_split_node("BT_a");
    const SplitNode b = parse_split_node("BT_b");
    bad.nodes = {a, b};
    EdgeSegment s;
    s.from = a;
    s.to = b;
    s.qty = 1;
    s.allocations = {Allocation{"1", 1, money("1.00"), money("1.00")}};
    s.m1 = s.m2 = money("1.00");
    bad.segments = {s};
    CHECK_THROWS_AS(decompose(bad), Error);
}

TEST_CASE("decomposition invariants hold on random books") {
    for (std::uint64_t seed = 200; seed < 260; ++seed) {
        GeneratorConfig cfg;
        cfg.seed = seed;
        cfg.n_agents = 2 + static_cast<int>(seed % 9);
        cfg.n_trades = 1 + static_cast<int>(seed % 40);
        const auto book = validate_book(generate_book(cfg));
        const auto edges = bilateral_net(book);
        const auto tfn = split_nodes(build_flow_network(edges), SplitPolicy::ascending());
        const auto d = decompose(tfn);

        // Pairwise preservation against the netted contracts.
        CHECK(pair_flows(edges) == pair_flows(d));

        // Uniform quantity, role endpoints, structural sanity.
        for (const auto& c : d.chains) {
            CHECK(c.qty > 0);
            CHECK(c.nodes.front().role == Role::MM);
            CHECK(c.nodes.back().role == Role::RM);
            for (std::size_t i = 0; i + 1 < c.nodes.size(); ++i) {
                if (i > 0) CHECK(c.nodes[i].role == Role::BT);
                CHECK(c.edges[i].from == c.nodes[i]);
                CHECK(c.edges[i].to == c.nodes[i + 1]);
                CHECK(c.edges[i].qty == c.qty);
            }
        }
        for (const auto& c : d.cycles) {
            CHECK(c.qty > 0);
            REQUIRE(c.edges.size() == c.nodes.size());
            for (std::size_t i = 0; i < c.nodes.size(); ++i) {
                CHECK(c.nodes[i].role == Role::BT);
                CHECK(c.edges[i].from == c.nodes[i]);
                CHECK(c.edges[i].to == c.nodes[(i + 1) % c.nodes.size()]);
                CHECK(c.edges[i].qty == c.qty);
            }
        }

        // Exhaustiveness: chains carry exactly the MM excess.
        Quantity chain_total = 0;
        for (const auto& c : d.chains) chain_total += c.qty;
        Quantity mm_total = 0;
        for (const auto& n : tfn.nodes)
            if (n.role == Role::MM) mm_total += tfn.excess_of(n);
        CHECK(chain_total == mm_total);
    }
}

TEST_CASE("first-leg mirror reverses flows and carries first-leg money") {
    const auto f = WorkedExample::make();
    const auto mirror = mirror_first_leg(f.decomposition);
    const auto& chain7 = repomech::test::find_structure(mirror, "chain-7-first-leg");
    REQUIRE(chain7.leg == Leg::first);
    REQUIRE(chain7.edges.size() == 4);
    // MM_g end: 2T toward MM_g, 12.44 toward BT_f.
    CHECK(edge_money(chain7, chain7.edges[0]) == money("12.44"));
    CHECK(edge_money(chain7, chain7.edges[1]) == money("9.20"));
    // Allocation-derived first-leg money on the BT_i->BT_g edge (trade 4).
    CHECK(edge_money(chain7, chain7.edges[2]) == money("6.00"));
    CHECK(edge_money(chain7, chain7.edges[3]) == money("12.44"));

    // Same topology and quantities as the second leg.
    const auto& second = repomech::test::find_structure(f.decomposition, "chain-7");
    CHECK(path_of(chain7) == path_of(second));
    CHECK(chain7.qty == second.qty);
}

TEST_CASE("first-leg mirror obligations reverse the money direction") {
    const auto f = WorkedExample::make();
    const auto mirror = mirror_first_leg(f.decomposition);
    const auto& chain7 = repomech::test::find_structure(mirror, "chain-7-first-leg");
    const auto contract = net_obligations(chain7);
    // At the first leg MM_g receives the collateral and pays 12.44.
    for (const auto& ob : contract.obligations) {
        if (ob.node.label() == "MM_g") {
            CHECK(ob.t_net == -2);
            CHECK(ob.m_net == money("12.44"));
        }
        if (ob.node.label() == "RM_f") {
            CHECK(ob.t_net == 2);
            CHECK(ob.m_net == money("-12.44"));
        }
    }
}
