#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "repomech/decimal.hpp"
#include "repomech/errors.hpp"

namespace repomech {

using AgentId = std::string;
using TradeId = std::string;
using Quantity = std::int64_t;

// Total order used for every id in the engine: shorter strings first,
// then lexicographic. Keeps "2" < "10" for numeric-looking ids.
inline bool id_less(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

// One initial bilateral repo contract. `lender` pays p1*qty and receives
// the collateral at the first leg; at the second leg it returns the
// collateral against p2*qty.
struct RepoTrade {
    TradeId trade_id;
    AgentId lender;
    AgentId borrower;
    Price p1;
    Price p2;
    Quantity qty = 0;
};

inline Rational repo_rate(const RepoTrade& t) {
    if (t.p1.raw() <= 0) raise(Errc::non_positive_price, "repo rate needs p1 > 0, trade " + t.trade_id);
    return Rational::of_money(t.p2 - t.p1, t.p1);
}

// A trade book whose invariants have been checked; trades are held in
// ascending trade_id order.
class ValidatedBook {
public:
    const std::vector<RepoTrade>& trades() const { return trades_; }
    bool empty() const { return trades_.empty(); }
    std::size_t size() const { return trades_.size(); }

    const RepoTrade& by_id(const TradeId& id) const {
        for (const auto& t : trades_)
            if (t.trade_id == id) return t;
        raise(Errc::bad_config, "no trade with id " + id);
    }

    std::vector<AgentId> agents() const {
        std::vector<AgentId> out;
        for (const auto& t : trades_) {
            out.push_back(t.lender);
            out.push_back(t.borrower);
        }
        std::sort(out.begin(), out.end(), id_less);
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    friend ValidatedBook validate_book(std::vector<RepoTrade> trades);
    std::vector<RepoTrade> trades_;
};

inline ValidatedBook validate_book(std::vector<RepoTrade> trades) {
    std::unordered_set<std::string> seen;
    for (const auto& t : trades) {
        if (t.trade_id.empty()) raise(Errc::parse_error, "trade with empty trade_id");
        if (!seen.insert(t.trade_id).second)
            raise(Errc::duplicate_trade_id, "trade " + t.trade_id);
        if (t.lender.empty() || t.borrower.empty())
            raise(Errc::parse_error, "trade " + t.trade_id + " has an empty agent id");
        if (t.lender == t.borrower) raise(Errc::self_trade, "trade " + t.trade_id);
        if (t.qty <= 0) raise(Errc::non_positive_quantity, "trade " + t.trade_id);
        if (t.p1.raw() <= 0) raise(Errc::non_positive_price, "trade " + t.trade_id);
        if (t.p2.raw() < 0) raise(Errc::non_positive_price, "trade " + t.trade_id);
    }
    std::sort(trades.begin(), trades.end(),
              [](const RepoTrade& a, const RepoTrade& b) { return id_less(a.trade_id, b.trade_id); });
    ValidatedBook book;
    book.trades_ = std::move(trades);
    return book;
}

}  // namespace repomech
