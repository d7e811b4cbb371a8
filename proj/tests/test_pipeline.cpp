#include <doctest.h>

#include "test_support.hpp"

using namespace repomech;
using repomech::test::fixture_path;
using repomech::test::money;
using repomech::test::example_book_trades;

TEST_CASE("book csv round-trips") {
    const auto trades = example_book_trades();
    const auto again = parse_book_csv(book_to_csv(trades));
    REQUIRE(again.size() == trades.size());
    for (std::size_t i = 0; i < trades.size(); ++i) {
        CHECK(again[i].trade_id == trades[i].trade_id);
        CHECK(again[i].p1 == trades[i].p1);
        CHECK(again[i].p2 == trades[i].p2);
        CHECK(again[i].qty == trades[i].qty);
    }
}

TEST_CASE("book csv rejects bad input") {
    CHECK_THROWS_AS(parse_book_csv(""), Error);
    CHECK_THROWS_AS(parse_book_csv("id,foo\n"), Error);
    CHECK_THROWS_AS(parse_book_csv(std::string(kBookCsvHeader) + "\n1,h,i,1.00,1.00\n"), Error);
    CHECK_THROWS_AS(parse_book_csv(std::string(kBookCsvHeader) + "\n1,h,i,1.00,1.00,xyz\n"), Error);
}

TEST_CASE("book json loads with the csv field names") {
    const auto trades = parse_book_json(R"({"trades": [
        {"trade_id": "1", "lender": "h", "borrower": "i",
         "first_leg_price": "4.90", "second_leg_price": "5.25", "quantity": 5}]})");
    REQUIRE(trades.size() == 1);
    CHECK(trades[0].p1 == money("4.90"));
    CHECK(trades[0].qty == 5);
}

TEST_CASE("generator is reproducible and always valid") {
    GeneratorConfig cfg;
    cfg.seed = 42;
    cfg.n_agents = 5;
    cfg.n_trades = 20;
    const auto a = book_to_csv(generate_book(cfg));
    const auto b = book_to_csv(generate_book(cfg));
    CHECK(a == b);

    cfg.seed = 43;
    CHECK(book_to_csv(generate_book(cfg)) != a);

    GeneratorConfig bad = cfg;
    bad.n_agents = 1;
    CHECK_THROWS_AS(generate_book(bad), Error);

    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        GeneratorConfig c;
        c.seed = seed;
        c.n_agents = 2 + static_cast<int>(seed % 9);
        c.n_trades = static_cast<int>(seed % 41);
        CHECK_NOTHROW(validate_book(generate_book(c)));
    }
}

TEST_CASE("full pipeline bundle is byte-identical across runs") {
    PipelineConfig config;
    config.policy = SplitPolicy::explicit_from(repomech::test::example_assignment());
    config.scenario = parse_scenario_json(read_file(fixture_path("chain7_bti.json")));
    SlrState slr;
    slr.capital = money("5");
    slr.assets = money("90");
    slr.exposures = money("10");
    slr.floor = money("0.05");
    config.slr = slr;
    config.ccp_fee_per_unit = money("0.01");

    const auto first = report_bundle(run_pipeline(example_book_trades(), config), config);
    const auto second = report_bundle(run_pipeline(example_book_trades(), config), config);
    CHECK(first.size() == second.size());
    for (const auto& [name, content] : first) {
        REQUIRE(second.count(name) == 1);
        CHECK_MESSAGE(second.at(name) == content, name);
    }
    CHECK(first.count("scenario_log.json") == 1);
    CHECK(first.count("accounting.json") == 1);
}

TEST_CASE("empty book produces an empty but well-formed bundle") {
    PipelineConfig config;
    const auto result = run_pipeline({}, config);
    CHECK(result.netted.empty());
    CHECK(result.decomposition.chains.empty());
    const auto bundle = report_bundle(result, config);
    CHECK(bundle.at("netted_edges.json").find("[]") != std::string::npos);
}

TEST_CASE("scenario application through the pipeline writes the 7a/7b/7c log") {
    PipelineConfig config;
    config.policy = SplitPolicy::explicit_from(repomech::test::example_assignment());
    config.scenario = parse_scenario_json(read_file(fixture_path("chain7_bti.json")));
    const auto result = run_pipeline(example_book_trades(), config);
    REQUIRE(result.scenario.has_value());
    REQUIRE(result.scenario->log().size() == 1);
    const auto& step = result.scenario->log().front();
    CHECK(step.terminated == "chain-7");
    CHECK(step.children == std::vector<std::string>{"chain-7a", "chain-7b", "chain-7c"});
}

TEST_CASE("scenario and assignment parsers reject malformed files") {
    CHECK_THROWS_AS(parse_scenario_json("{"), Error);
    CHECK_THROWS_AS(parse_scenario_json(R"({"events": [{"structure_id": "x"}]})"), Error);
    CHECK_THROWS_AS(parse_scenario_json(
                        R"({"events": [{"structure_id": "x", "node": "BT_i", "object": "Q"}]})"),
                    Error);
    CHECK_THROWS_AS(parse_assignment_json(R"({"assignments": [{"node": "XX_g", "takes": []}]})"),
                    Error);
    CHECK_THROWS_AS(parse_split_node("nounderscore"), Error);
}
