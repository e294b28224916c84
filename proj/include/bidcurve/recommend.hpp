#pragma once

#include <functional>
#include <optional>

#include "bidcurve/types.hpp"

namespace bidcurve::recommend {

// Cost granularity of the budget and strategy searches, one tenth of a cent.
inline constexpr Money kCostStep = 1e-3;

// Cost at which the fitted click curve switches from convex to concave,
// shift/steepness, clamped to the cost domain (non-positive shift gives 0).
Money inflection_cost(const SigmoidParams& sp);

// Cost on the falling side of the slope peak where h' drops to 90% of its
// value at the inflection (at h'(0) when the curve has no interior
// inflection). Solved by bisection to floating-point resolution.
Money inflection90_cost(const SigmoidParams& sp);

// Largest cost on the kCostStep lattice in [0, upper] whose spend stays
// within budget, found by bisection with one-notch step adjustments. Returns
// `upper` itself when it is affordable and 0 when nothing is.
Money binary_search_cost(const std::function<Money(Money)>& spend_curve,
                         Money upper, Money budget);

// Smallest bid whose landscape cost reaches `cost`, by inverting the
// piecewise-linear cost curve. Costs beyond the grid clamp to the extreme
// bids; `extrapolated` (optional) reports the high-side clamp.
Money cost_to_bid(const BidLandscape& l, Money cost, bool* extrapolated = nullptr);

// Convert an eCPM bid to its per-click equivalent.
Money cpc_from_ecpm(Money ecpm_bid, double ctr);

// Pick an operating cost for one campaign under one strategy, map it to a
// bid, and predict clicks and spend there with the fitted model. NoOpt
// echoes `current_bid` (required for that strategy only); every strategy
// respects the budget, falling back to the largest affordable lattice cost
// when its natural target overspends.
Recommendation recommend(const FitResult& fit, const BidLandscape& l,
                         BudgetConstraint budget, Strategy strategy,
                         std::optional<Money> current_bid = {});

}  // namespace bidcurve::recommend
