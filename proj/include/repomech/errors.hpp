#pragma once

#include <stdexcept>
#include <string>

namespace repomech {

enum class Errc {
    duplicate_trade_id,
    self_trade,
    non_positive_quantity,
    non_positive_price,
    unknown_agent,
    malformed_tfn,
    invalid_assignment,
    invalid_event,
    empty_feasible_range,
    not_binding,
    non_positive_denominator,
    overflow,
    parse_error,
    io_error,
    bad_config,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::duplicate_trade_id: return "DuplicateTradeId";
        case Errc::self_trade: return "SelfTrade";
        case Errc::non_positive_quantity: return "NonPositiveQuantity";
        case Errc::non_positive_price: return "NonPositivePrice";
        case Errc::unknown_agent: return "UnknownAgent";
        case Errc::malformed_tfn: return "MalformedTFN";
        case Errc::invalid_assignment: return "InvalidAssignment";
        case Errc::invalid_event: return "InvalidEvent";
        case Errc::empty_feasible_range: return "EmptyFeasibleRange";
        case Errc::not_binding: return "NotBinding";
        case Errc::non_positive_denominator: return "NonPositiveDenominator";
        case Errc::overflow: return "Overflow";
        case Errc::parse_error: return "ParseError";
        case Errc::io_error: return "IoError";
        case Errc::bad_config: return "BadConfig";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace repomech
