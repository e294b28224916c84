#pragma once

#include <span>

#include "bidcurve/types.hpp"

namespace bidcurve::metrics {

// Mean absolute percentage error, |a - p| / a averaged over points.
// Throws ZeroActual (with the offending index) when any actual is zero.
double mape(std::span<const double> actual, std::span<const double> predicted);

// Root mean squared error.
double rmse(std::span<const double> actual, std::span<const double> predicted);

// The inflection estimate a spreadsheet would make: the cost starting the
// segment with the largest forward-difference slope (ties to the lower
// cost). Works on raw, possibly noisy curve points.
Money naive_inflection(const ClickCostCurve& curve);

// Relative drop in empirical slope when moving from the naive inflection
// estimate to the curve-fit one: (d_naive - d_cf) / d_naive, with both
// slopes read off the raw curve by forward differences.
double diff_r(const ClickCostCurve& curve, Money naive_cost, Money curvefit_cost);

// Elasticities alpha (clicks vs cost), beta (clicks vs spend), and marginal
// clicks-per-dollar gamma at one bid, by centered differences of width
// `delta` over the landscape maps, with gamma's theoretical floor. The fit
// is checked (converged sigmoid) but the numbers are landscape-empirical.
Elasticities elasticities(const FitResult& fit, const BidLandscape& l,
                            Money bid, Money delta = 1e-3);

// Relative bid/click changes of a proposed recommendation against the
// current one, plus the click yield h' at both operating costs.
LiftRatios lift_ratios(const Recommendation& current, const Recommendation& proposed,
                       const SigmoidParams& sp);

}  // namespace bidcurve::metrics
