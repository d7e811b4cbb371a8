#pragma once

#include <cmath>
#include <limits>

#include "repomech/errors.hpp"

namespace repomech::econ {

// Model curves run in floating point; tolerances are stated per operation.

// Hedge-fund collateral supply: decreasing and concave in the repo rate,
// zero at and above the expected excess return alpha.
struct HedgeFundParams {
    double alpha = 0.0;        // expected excess return
    double gamma_sigma2 = 0.0; // risk aversion times variance
    double k = 0.0;            // quadratic funding cost
    double m = 0.0;            // cubic scale coefficient

    double a_coeff() const { return gamma_sigma2 + k; }

    void validate() const {
        if (gamma_sigma2 <= 0 || m <= 0 || k < 0)
            raise(Errc::bad_config, "hedge fund params need gamma_sigma2 > 0, m > 0, k >= 0");
    }
};

inline double hedge_fund_supply(double r, const HedgeFundParams& p) {
    p.validate();
    if (r >= p.alpha) return 0.0;
    const double A = p.a_coeff();
    const double gap = p.alpha - r;
    // Conjugate form of (-A + sqrt(A^2 + 4m*gap)) / 2m; stable for small gap.
    return 2.0 * gap / (A + std::sqrt(A * A + 4.0 * p.m * gap));
}

inline double hedge_fund_supply_slope(double r, const HedgeFundParams& p) {
    const double s = hedge_fund_supply(r, p);
    return -1.0 / (p.a_coeff() + 2.0 * p.m * s);
}

inline double hedge_fund_supply_curvature(double r, const HedgeFundParams& p) {
    const double s = hedge_fund_supply(r, p);
    const double d = p.a_coeff() + 2.0 * p.m * s;
    return -2.0 * p.m / (d * d * d);
}

// Money-market-fund demand for one dealer's repo: increasing and concave
// above the outside-option floor r0, zero below it.
struct MmfParams {
    double a = 0.0;
    double b = 0.0;
    double r0 = 0.0;

    void validate() const {
        if (a <= 0 || b <= 0) raise(Errc::bad_config, "MMF params need a > 0 and b > 0");
    }
};

inline double mmf_demand(double r, const MmfParams& p) {
    p.validate();
    if (r <= p.r0) return 0.0;
    const double gap = r - p.r0;
    return 2.0 * gap / (p.a + std::sqrt(p.a * p.a + 4.0 * p.b * gap));
}

inline double mmf_demand_slope(double r, const MmfParams& p) {
    const double d = mmf_demand(r, p);
    return 1.0 / (p.a + 2.0 * p.b * d);
}

inline double mmf_demand_curvature(double r, const MmfParams& p) {
    const double d = mmf_demand(r, p);
    const double den = p.a + 2.0 * p.b * d;
    return -2.0 * p.b / (den * den * den);
}

// Rate at which demand reaches `volume` (inverse of the demand curve).
inline double mmf_rate_at_volume(double volume, const MmfParams& p) {
    p.validate();
    return p.r0 + p.a * volume + p.b * volume * volume;
}

// Dealer problem: choose the client rate r in [r0, r_int] to maximize
// (r_int - r) * D(r) - c * floor * max(D(r) - d_bar, 0).
struct DealerParams {
    double r_int = 0.0;  // inter-dealer rate
    double c = 0.0;      // unit cost of capital
    double floor = 0.0;  // SLR lower bound
    double d_bar = std::numeric_limits<double>::infinity();  // volume at the constraint
    MmfParams demand;

    void validate() const {
        demand.validate();
        if (c < 0) raise(Errc::bad_config, "capital cost must be non-negative");
        if (floor <= 0 || floor >= 1) raise(Errc::bad_config, "floor must lie in (0, 1)");
        if (d_bar < 0) raise(Errc::bad_config, "d_bar must be non-negative");
    }
};

struct DealerOptimum {
    double r_star = 0.0;
    double volume = 0.0;
    bool constrained = false;  // demand at the optimum reaches d_bar
    double profit = 0.0;
};

inline double dealer_profit(double r, const DealerParams& p) {
    const double d = mmf_demand(r, p.demand);
    const double over = d > p.d_bar ? d - p.d_bar : 0.0;
    return (p.r_int - r) * d - p.c * p.floor * over;
}

// First-order condition on the constrained branch (zero penalty recovers
// the unconstrained one).
inline double dealer_foc(double r, const DealerParams& p, double penalty) {
    return (p.r_int - r - penalty) * mmf_demand_slope(r, p.demand) - mmf_demand(r, p.demand);
}

namespace detail {

// The FOC is strictly decreasing on each smooth branch; bisect it.
inline double bisect_foc(double lo, double hi, const DealerParams& p, double penalty) {
    double flo = dealer_foc(lo, p, penalty);
    double fhi = dealer_foc(hi, p, penalty);
    if (flo <= 0) return lo;
    if (fhi >= 0) return hi;
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = dealer_foc(mid, p, penalty);
        if (fm > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Global maximizer of the piecewise-concave dealer objective. The kink
// sits where D(r) = d_bar; each smooth branch is solved by bisecting its
// first-order condition and the better branch wins.
inline DealerOptimum dealer_optimal_rate(const DealerParams& p) {
    p.validate();
    const double r_lo = p.demand.r0;
    const double r_hi = p.r_int;
    if (r_hi < r_lo)
        raise(Errc::empty_feasible_range,
              "inter-dealer rate below the demand floor leaves no feasible rate");

    double r_kink = std::numeric_limits<double>::infinity();
    if (std::isfinite(p.d_bar)) r_kink = mmf_rate_at_volume(p.d_bar, p.demand);

    DealerOptimum best;
    best.r_star = r_lo;
    best.volume = mmf_demand(r_lo, p.demand);
    best.profit = dealer_profit(r_lo, p);
    auto consider = [&](double r) {
        if (r < r_lo || r > r_hi) return;
        const double profit = dealer_profit(r, p);
        if (profit > best.profit || (profit == best.profit && r < best.r_star)) {
            best.r_star = r;
            best.profit = profit;
            best.volume = mmf_demand(r, p.demand);
        }
    };

    // Unconstrained branch: [r_lo, min(r_kink, r_hi)].
    consider(detail::bisect_foc(r_lo, std::min(r_kink, r_hi), p, 0.0));
    // Constrained branch: [r_kink, r_hi].
    if (r_kink <= r_hi) {
        consider(r_kink);
        consider(detail::bisect_foc(std::max(r_kink, r_lo), r_hi, p, p.c * p.floor));
    }
    consider(r_hi);

    best.constrained = std::isfinite(p.d_bar) && best.volume >= p.d_bar - 1e-12;
    return best;
}

// Central-difference response of the optimal client rate to the SLR lower
// bound; non-positive whenever the constraint binds.
inline double slr_rate_sensitivity(const DealerParams& p, double dl) {
    p.validate();
    if (dl <= 0) raise(Errc::bad_config, "dl must be positive");
    auto at_floor = [&](double floor) {
        DealerParams q = p;
        q.floor = floor;
        const DealerOptimum opt = dealer_optimal_rate(q);
        if (!opt.constrained)
            raise(Errc::not_binding,
                  "optimum unconstrained at floor " + std::to_string(floor));
        return opt.r_star;
    };
    const double up = at_floor(p.floor + dl);
    const double down = at_floor(p.floor - dl);
    return (up - down) / (2.0 * dl);
}

}  // namespace repomech::econ
