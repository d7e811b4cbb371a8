#pragma once

#include <cstdint>
#include <compare>
#include <numeric>
#include <string>
#include <string_view>

#include "repomech/errors.hpp"

namespace repomech {

// Signed fixed-point amount with 4 decimal places, stored as a scaled
// int64. Used for every money and price value in the engine; prices and
// integer quantities multiply without rounding, so ledger identities hold
// bit-exactly. No general division is provided; rate-like quotients live
// in Rational.
class Money {
public:
    static constexpr std::int64_t scale = 10'000;

    constexpr Money() = default;

    static constexpr Money from_raw(std::int64_t raw) {
        Money m;
        m.raw_ = raw;
        return m;
    }

    static constexpr Money from_int(std::int64_t units) { return from_raw(checked_mul(units, scale)); }

    // Accepts [+-]digits[.digits], at most 4 fractional digits.
    static Money parse(std::string_view s) {
        const std::string_view original = s;
        bool negative = false;
        if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
            negative = s.front() == '-';
            s.remove_prefix(1);
        }
        if (s.empty()) raise(Errc::parse_error, "empty decimal literal");
        __int128 raw = 0;
        std::size_t i = 0;
        bool any_int_digit = false;
        for (; i < s.size() && s[i] != '.'; ++i) {
            if (s[i] < '0' || s[i] > '9')
                raise(Errc::parse_error, "bad decimal literal '" + std::string(original) + "'");
            raw = raw * 10 + (s[i] - '0');
            any_int_digit = true;
            if (raw > max_raw_) raise(Errc::overflow, "decimal literal out of range");
        }
        int frac_digits = 0;
        if (i < s.size()) {  // fractional part
            ++i;
            if (i == s.size() && !any_int_digit)
                raise(Errc::parse_error, "bad decimal literal '" + std::string(original) + "'");
            for (; i < s.size(); ++i) {
                if (s[i] < '0' || s[i] > '9')
                    raise(Errc::parse_error, "bad decimal literal '" + std::string(original) + "'");
                if (++frac_digits > 4)
                    raise(Errc::parse_error,
                          "more than 4 decimal places in '" + std::string(original) + "'");
                raw = raw * 10 + (s[i] - '0');
            }
        } else if (!any_int_digit) {
            raise(Errc::parse_error, "bad decimal literal '" + std::string(original) + "'");
        }
        for (; frac_digits < 4; ++frac_digits) raw *= 10;
        if (raw > max_raw_) raise(Errc::overflow, "decimal literal out of range");
        return from_raw(static_cast<std::int64_t>(negative ? -raw : raw));
    }

    constexpr std::int64_t raw() const { return raw_; }
    constexpr bool is_zero() const { return raw_ == 0; }
    constexpr bool is_negative() const { return raw_ < 0; }

    constexpr Money operator-() const { return from_raw(checked_neg(raw_)); }
    constexpr Money abs() const { return raw_ < 0 ? -*this : *this; }

    friend constexpr Money operator+(Money a, Money b) { return from_raw(checked_add(a.raw_, b.raw_)); }
    friend constexpr Money operator-(Money a, Money b) { return from_raw(checked_add(a.raw_, checked_neg(b.raw_))); }
    friend constexpr Money operator*(Money a, std::int64_t k) { return from_raw(checked_mul(a.raw_, k)); }
    friend constexpr Money operator*(std::int64_t k, Money a) { return a * k; }

    Money& operator+=(Money o) { return *this = *this + o; }
    Money& operator-=(Money o) { return *this = *this - o; }

    friend constexpr auto operator<=>(Money a, Money b) = default;

    double to_double() const { return static_cast<double>(raw_) / scale; }

    // Fixed rendering with trailing zeros trimmed to cent precision:
    // "13.06", "6.00", "2.825", "-0.62".
    std::string to_string() const {
        std::int64_t r = raw_;
        std::string sign;
        if (r < 0) {
            sign = "-";
            r = -r;
        }
        std::string frac = std::to_string(r % scale);
        frac.insert(0, 4 - frac.size(), '0');
        while (frac.size() > 2 && frac.back() == '0') frac.pop_back();
        return sign + std::to_string(r / scale) + "." + frac;
    }

private:
    static constexpr std::int64_t max_raw_ = INT64_MAX;

    static constexpr std::int64_t checked_neg(std::int64_t v) {
        if (v == INT64_MIN) raise(Errc::overflow, "money negation overflow");
        return -v;
    }
    static constexpr std::int64_t checked_add(std::int64_t a, std::int64_t b) {
        std::int64_t out = 0;
        if (__builtin_add_overflow(a, b, &out)) raise(Errc::overflow, "money addition overflow");
        return out;
    }
    static constexpr std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
        std::int64_t out = 0;
        if (__builtin_mul_overflow(a, b, &out)) raise(Errc::overflow, "money multiplication overflow");
        return out;
    }

    std::int64_t raw_ = 0;
};

// Unit price of the security; same representation as Money.
using Price = Money;

// Exact signed rational, normalized with positive denominator. Carries
// repo rates and SLR ratios, where 4-dp fixed point cannot represent the
// quotient exactly.
class Rational {
public:
    constexpr Rational() = default;

    Rational(std::int64_t num, std::int64_t den) {
        if (den == 0) raise(Errc::non_positive_denominator, "zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        num_ = g ? num / g : num;
        den_ = g ? den / g : 1;
    }

    static Rational of_money(Money num, Money den) { return Rational(num.raw(), den.raw()); }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return a == b || a < b; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace repomech
