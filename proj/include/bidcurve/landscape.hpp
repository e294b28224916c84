#pragma once

#include <span>
#include <vector>

#include "bidcurve/types.hpp"

namespace bidcurve::landscape {

// Aggregate raw auction rows into a monotone bid landscape. Rows are
// bucketed to the cent, win rate and mean winning price are computed per
// bucket, and both series are repaired to be non-decreasing in bid with a
// weighted isotonic regression (win rate weighted by auctions, price by
// wins). Throws TooFewObservations below 4 distinct bid buckets and
// InconsistentCampaign when rows mix campaign ids or ctr values.
BidLandscape build_landscape(std::span<const AuctionObservation> rows);

// Win rate at an arbitrary bid: piecewise linear between grid points, exact
// at them, clamped to the end values outside the grid.
double winrate_at(const BidLandscape& l, Money bid);

// Expected price paid per won mille at a bid, interpolated the same way.
Money ecpm_cost_at(const BidLandscape& l, Money bid);

// Expected clicks at a bid: impressions * win_rate(bid) * ctr.
double clicks_at(const BidLandscape& l, Money bid);

// Expected spend at a bid: clicks(bid) * ecpm_cost(bid) / (1000 * ctr).
Money spend_at(const BidLandscape& l, Money bid);

// Reduce the landscape to clicks as a function of realized cost. Points come
// out sorted by cost; points sharing a cost (common after isotonic pooling)
// collapse to the one with the most clicks.
ClickCostCurve click_cost_pairs(const BidLandscape& l);

namespace detail {
// In-place weighted pool-adjacent-violators, non-decreasing fit.
// Zero-weight entries take on their block's weighted mean (or the plain mean
// when the whole block has zero weight).
void pav_increasing(std::span<double> values, std::span<const double> weights);
}  // namespace detail

}  // namespace bidcurve::landscape
