#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repomech/trade.hpp"

namespace repomech {

inline constexpr const char* kBookCsvHeader =
    "trade_id,lender,borrower,first_leg_price,second_leg_price,quantity";

inline std::vector<RepoTrade> parse_book_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) raise(Errc::parse_error, "empty book file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kBookCsvHeader)
        raise(Errc::parse_error, std::string("expected header '") + kBookCsvHeader + "'");
    std::vector<RepoTrade> trades;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 6)
            raise(Errc::parse_error, "line " + std::to_string(lineno) + ": expected 6 fields");
        RepoTrade t;
        t.trade_id = fields[0];
        t.lender = fields[1];
        t.borrower = fields[2];
        t.p1 = Money::parse(fields[3]);
        t.p2 = Money::parse(fields[4]);
        try {
            std::size_t used = 0;
            t.qty = std::stoll(fields[5], &used);
            if (used != fields[5].size()) throw std::invalid_argument(fields[5]);
        } catch (const std::exception&) {
            raise(Errc::parse_error,
                  "line " + std::to_string(lineno) + ": bad quantity '" + fields[5] + "'");
        }
        trades.push_back(std::move(t));
    }
    return trades;
}

inline std::string book_to_csv(const std::vector<RepoTrade>& trades) {
    std::string out = std::string(kBookCsvHeader) + "\n";
    for (const auto& t : trades) {
        out += t.trade_id + "," + t.lender + "," + t.borrower + "," + t.p1.to_string() + "," +
               t.p2.to_string() + "," + std::to_string(t.qty) + "\n";
    }
    return out;
}

inline std::vector<RepoTrade> parse_book_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse_error, std::string("bad book JSON: ") + e.what());
    }
    const auto& arr = j.is_object() && j.contains("trades") ? j.at("trades") : j;
    if (!arr.is_array()) raise(Errc::parse_error, "book JSON must be an array of trades");
    std::vector<RepoTrade> trades;
    for (const auto& row : arr) {
        RepoTrade t;
        try {
            t.trade_id = row.at("trade_id").get<std::string>();
            t.lender = row.at("lender").get<std::string>();
            t.borrower = row.at("borrower").get<std::string>();
            t.p1 = Money::parse(row.at("first_leg_price").get<std::string>());
            t.p2 = Money::parse(row.at("second_leg_price").get<std::string>());
            t.qty = row.at("quantity").get<std::int64_t>();
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::parse_error, std::string("bad trade row: ") + e.what());
        }
        trades.push_back(std::move(t));
    }
    return trades;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write " + path);
    out << content;
}

inline std::vector<RepoTrade> load_book(const std::string& path) {
    const std::string text = read_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return parse_book_json(text);
    return parse_book_csv(text);
}

}  // namespace repomech
