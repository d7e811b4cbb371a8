#include <doctest.h>

#include <cmath>

#include "test_support.hpp"

using namespace repomech;
using namespace repomech::econ;

namespace {

HedgeFundParams hedge(double alpha, double gs2, double k, double m) {
    HedgeFundParams p;
    p.alpha = alpha;
    p.gamma_sigma2 = gs2;
    p.k = k;
    p.m = m;
    return p;
}

MmfParams mmf(double a, double b, double r0) {
    MmfParams p;
    p.a = a;
    p.b = b;
    p.r0 = r0;
    return p;
}

DealerParams dealer(double r_int, double c, double floor, double d_bar, MmfParams demand) {
    DealerParams p;
    p.r_int = r_int;
    p.c = c;
    p.floor = floor;
    p.d_bar = d_bar;
    p.demand = demand;
    return p;
}

// Dense grid argmax, the independent optimizer oracle.
double grid_argmax(const DealerParams& p, double step) {
    double best_r = p.demand.r0;
    double best = dealer_profit(best_r, p);
    for (double r = p.demand.r0; r <= p.r_int + step / 2; r += step) {
        const double v = dealer_profit(r, p);
        if (v > best) {
            best = v;
            best_r = r;
        }
    }
    return best_r;
}

}  // namespace

TEST_CASE("hedge fund supply closed form") {
    // Solve S + S^2 = 2 by hand: S = 1.
    const auto p = hedge(3.0, 1.0, 0.0, 1.0);
    CHECK(hedge_fund_supply(1.0, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hedge_fund_supply(p.alpha, p) == 0.0);
    CHECK(hedge_fund_supply(p.alpha + 0.5, p) == 0.0);
    // Continuous at the boundary.
    CHECK(hedge_fund_supply(p.alpha - 1e-12, p) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("mmf demand closed form") {
    // Solve D + D^2 = 2: D = 1.
    const auto p = mmf(1.0, 1.0, 0.01);
    CHECK(mmf_demand(p.r0 + 2.0, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mmf_demand(p.r0, p) == 0.0);
    CHECK(mmf_demand(p.r0 - 0.5, p) == 0.0);
    CHECK(mmf_rate_at_volume(mmf_demand(p.r0 + 2.0, p), p) ==
          doctest::Approx(p.r0 + 2.0).epsilon(1e-12));
}

TEST_CASE("analytic slopes match central differences on a grid") {
    const auto hp = hedge(0.06, 0.8, 0.3, 2.0);
    const auto mp = mmf(0.7, 1.3, 0.015);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const double r_s = -0.01 + (0.055 + 0.01) * i / 99.0;  // interior of supply domain
        if (r_s + h < hp.alpha) {
            const double fd =
                (hedge_fund_supply(r_s + h, hp) - hedge_fund_supply(r_s - h, hp)) / (2 * h);
            CHECK(std::abs(fd - hedge_fund_supply_slope(r_s, hp)) < 1e-6);
        }
        const double r_d = 0.0155 + (0.10 - 0.0155) * i / 99.0;  // above the floor
        const double fd =
            (mmf_demand(r_d + h, mp) - mmf_demand(r_d - h, mp)) / (2 * h);
        CHECK(std::abs(fd - mmf_demand_slope(r_d, mp)) < 1e-6);
    }
}

TEST_CASE("both curves are concave: second differences non-positive") {
    const auto hp = hedge(0.06, 0.8, 0.3, 2.0);
    const auto mp = mmf(0.7, 1.3, 0.015);
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
        const double r_s = -0.01 + 0.06 * i / 99.0;
        if (r_s + h < hp.alpha) {
            const double dd = hedge_fund_supply(r_s + h, hp) - 2 * hedge_fund_supply(r_s, hp) +
                              hedge_fund_supply(r_s - h, hp);
            CHECK(dd <= 1e-9);
        }
        const double r_d = 0.0151 + 0.08 * i / 99.0;
        const double dd = mmf_demand(r_d + h, mp) - 2 * mmf_demand(r_d, mp) +
                          mmf_demand(r_d - h, mp);
        CHECK(dd <= 1e-9);
        CHECK(hedge_fund_supply_curvature(r_s, hp) < 0);
        CHECK(mmf_demand_curvature(r_d, mp) < 0);
    }
}

TEST_CASE("free capital makes the constrained and unconstrained problems coincide") {
    const auto demand = mmf(1.0, 2.0, 0.01);
    const auto constrained = dealer(0.05, 0.0, 0.05, 0.005, demand);
    auto unconstrained = constrained;
    unconstrained.d_bar = std::numeric_limits<double>::infinity();
    const auto a = dealer_optimal_rate(constrained);
    const auto b = dealer_optimal_rate(unconstrained);
    CHECK(a.r_star == doctest::Approx(b.r_star).epsilon(1e-10));
    // With c = 0 the optimum solves (r_int - r) D'(r) = D(r).
    CHECK(std::abs(dealer_foc(a.r_star, constrained, 0.0)) < 1e-8);
}

TEST_CASE("unbounded constraint volume is never binding") {
    const auto p = dealer(0.05, 1.0, 0.05, std::numeric_limits<double>::infinity(),
                          mmf(1.0, 2.0, 0.01));
    const auto opt = dealer_optimal_rate(p);
    CHECK_FALSE(opt.constrained);
}

TEST_CASE("binding optimum satisfies the first-order condition and the grid oracle") {
    const auto p = dealer(0.05, 0.8, 0.04, 1e-4, mmf(0.9, 1.5, 0.012));
    const auto opt = dealer_optimal_rate(p);
    REQUIRE(opt.constrained);
    CHECK(opt.volume > p.d_bar);
    CHECK(std::abs(dealer_foc(opt.r_star, p, p.c * p.floor)) < 1e-8);
    CHECK(std::abs(opt.r_star - grid_argmax(p, 1e-6)) < 1e-5);
}

TEST_CASE("optimizer handles the kink and the empty range") {
    // Kink above every interior optimum: cost makes crossing d_bar unprofitable.
    const auto demand = mmf(1.0, 2.0, 0.01);
    const auto p = dealer(0.05, 2000.0, 0.05, 0.008, demand);
    const auto opt = dealer_optimal_rate(p);
    CHECK(opt.volume <= p.d_bar + 1e-9);

    auto empty = p;
    empty.r_int = 0.005;  // below the demand floor
    CHECK_THROWS_AS(dealer_optimal_rate(empty), Error);
}

TEST_CASE("rate sensitivity to the leverage floor is negative when binding") {
    const auto p = dealer(0.05, 0.8, 0.04, 1e-4, mmf(0.9, 1.5, 0.012));
    const double dl = 1e-4;
    const double sens = slr_rate_sensitivity(p, dl);
    CHECK(sens < 0.0);

    // Implicit-function oracle: dr/dL = -(df/dL)/(df/dr) at the optimum.
    const auto opt = dealer_optimal_rate(p);
    const double slope = mmf_demand_slope(opt.r_star, p.demand);
    const double curv = mmf_demand_curvature(opt.r_star, p.demand);
    const double df_dl = -p.c * slope;
    const double df_dr = -2.0 * slope + (p.r_int - opt.r_star - p.c * p.floor) * curv;
    const double analytic = -df_dl / df_dr;
    CHECK(std::abs(sens - analytic) / std::abs(analytic) < 1e-4);
}

TEST_CASE("zero capital cost makes the floor irrelevant") {
    const auto p = dealer(0.05, 0.0, 0.04, 1e-4, mmf(0.9, 1.5, 0.012));
    CHECK(slr_rate_sensitivity(p, 1e-4) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("sensitivity demands a binding optimum") {
    const auto p = dealer(0.05, 1.0, 0.04, std::numeric_limits<double>::infinity(),
                          mmf(0.9, 1.5, 0.012));
    CHECK_THROWS_AS(slr_rate_sensitivity(p, 1e-4), Error);
}

TEST_CASE("traded volume is non-increasing in the leverage floor") {
    const auto base = dealer(0.05, 0.8, 0.03, 1e-4, mmf(0.9, 1.5, 0.012));
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20; ++i) {
        auto p = base;
        p.floor = 0.03 + 0.002 * i;
        const auto opt = dealer_optimal_rate(p);
        REQUIRE(opt.constrained);
        CHECK(opt.volume <= prev + 1e-12);
        prev = opt.volume;
    }
}
