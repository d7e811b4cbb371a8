#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "repomech/trade.hpp"

namespace repomech {

// Deterministic random book generator for property suites. A given seed
// produces the same book on every platform (only mt19937_64 outputs are
// consumed, never std:: distributions).
//
// Both directions of a pair trade at the pair's single (p1, p2), the way
// offsetting repo trades on one security and term share a price. That
// keeps every netted edge's money non-negative, which the clearing
// comparison property relies on.
struct GeneratorConfig {
    std::uint64_t seed = 0;
    int n_agents = 2;
    int n_trades = 0;
    int max_qty = 12;
    int max_rate_bps = 50;
};

namespace detail {
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    // n is tiny here; modulo bias is irrelevant and keeps output portable.
    return rng() % n;
}
}  // namespace detail

inline std::string agent_name(int index) {
    std::string name;
    do {
        name.insert(name.begin(), static_cast<char>('a' + index % 26));
        index = index / 26 - 1;
    } while (index >= 0);
    return name;
}

inline std::vector<RepoTrade> generate_book(const GeneratorConfig& cfg) {
    if (cfg.n_agents < 2) raise(Errc::bad_config, "generator needs at least 2 agents");
    if (cfg.n_trades < 0) raise(Errc::bad_config, "generator needs a non-negative trade count");
    std::mt19937_64 rng(cfg.seed);
    std::map<std::pair<int, int>, std::pair<Money, Money>> pair_prices;
    std::vector<RepoTrade> trades;
    for (int i = 0; i < cfg.n_trades; ++i) {
        const int lender = static_cast<int>(detail::bounded(rng, cfg.n_agents));
        int borrower = static_cast<int>(detail::bounded(rng, cfg.n_agents - 1));
        if (borrower >= lender) ++borrower;
        const auto key = std::minmax(lender, borrower);
        auto found = pair_prices.find(key);
        if (found == pair_prices.end()) {
            // p1 in [1.00, 99.99]; p2 = p1 * (1 + rate), rate in whole bps.
            const std::int64_t cents = 100 + static_cast<std::int64_t>(detail::bounded(rng, 9900));
            const std::int64_t bps = static_cast<std::int64_t>(detail::bounded(
                rng, static_cast<std::uint64_t>(cfg.max_rate_bps) + 1));
            const Money p1 = Money::from_raw(cents * 100);
            const std::int64_t num = p1.raw() * (10'000 + bps);
            const Money p2 = Money::from_raw((num + 5'000) / 10'000);
            found = pair_prices.emplace(key, std::make_pair(p1, p2)).first;
        }
        RepoTrade t;
        t.trade_id = "t" + std::to_string(i + 1);
        t.lender = agent_name(lender);
        t.borrower = agent_name(borrower);
        t.p1 = found->second.first;
        t.p2 = found->second.second;
        t.qty = 1 + static_cast<Quantity>(detail::bounded(rng, cfg.max_qty));
        trades.push_back(std::move(t));
    }
    return trades;
}

}  // namespace repomech
