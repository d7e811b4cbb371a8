#include <doctest.h>

#include "test_support.hpp"

using namespace repomech;
using repomech::test::money;

TEST_CASE("money parses and renders 4dp decimals exactly") {
    CHECK(money("4.90").raw() == 49'000);
    CHECK(money("0.0001").raw() == 1);
    CHECK(money("-13.06").raw() == -130'600);
    CHECK(money("25").raw() == 250'000);
    CHECK(money("+3.3").raw() == 33'000);

    CHECK(money("8.20").to_string() == "8.20");
    CHECK(money("8.2").to_string() == "8.20");
    CHECK(money("-0.62").to_string() == "-0.62");
    CHECK(money("2.8250").to_string() == "2.825");
    CHECK(money("0").to_string() == "0.00");
    CHECK(money("1.0001").to_string() == "1.0001");
}

TEST_CASE("money rejects malformed literals") {
    CHECK_THROWS_AS(money(""), Error);
    CHECK_THROWS_AS(money("1.23456"), Error);  // 5 decimal places
    CHECK_THROWS_AS(money("12a.4"), Error);
    CHECK_THROWS_AS(money("."), Error);
    CHECK_THROWS_AS(money("--1"), Error);
}

TEST_CASE("quantity times price is exact") {
    CHECK(money("3.30") * 10 - money("3.10") * 8 == money("8.20"));
    CHECK(money("5.25") * 5 == money("26.25"));
    CHECK((money("6.53") * 2).to_string() == "13.06");
}

TEST_CASE("money addition overflow throws") {
    const Money big = Money::from_raw(INT64_MAX);
    CHECK_THROWS_AS(big + money("1"), Error);
    CHECK_THROWS_AS(big * 2, Error);
}

TEST_CASE("rational reduces and compares exactly") {
    const Rational r = Rational::of_money(money("5.25") - money("4.90"), money("4.90"));
    CHECK(r == Rational(1, 14));
    CHECK(r.num() == 1);
    CHECK(r.den() == 14);
    CHECK(Rational(1, 14) < Rational(1, 13));
    CHECK(Rational(-1, 2) < Rational(0, 5));
    CHECK(Rational(5, 100) == Rational(1, 20));
    CHECK(Rational(2, -4) == Rational(-1, 2));
    CHECK_THROWS_AS(Rational(1, 0), Error);
}
