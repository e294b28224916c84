#include "bidcurve/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "bidcurve/errors.hpp"

namespace bidcurve::landscape {

namespace detail {

void pav_increasing(std::span<double> values, std::span<const double> weights) {
    // Pool-adjacent-violators for a non-decreasing fit under weighted least
    // squares [Barlow et al. 1972]. Blocks carry both weighted and plain
    // sums so all-zero-weight blocks still get a defined level.
    struct Block {
        double wv_sum, w_sum, v_sum;
        std::size_t count;
    };
    if (values.size() != weights.size()) {
        throw LengthMismatch("pav: values and weights differ in length");
    }
    std::vector<Block> stack;
    stack.reserve(values.size());
    auto level = [](const Block& b) {
        return b.w_sum > 0.0 ? b.wv_sum / b.w_sum : b.v_sum / static_cast<double>(b.count);
    };
    for (std::size_t i = 0; i < values.size(); ++i) {
        stack.push_back({weights[i] * values[i], weights[i], values[i], 1});
        while (stack.size() >= 2 && level(stack[stack.size() - 2]) > level(stack.back())) {
            Block top = stack.back();
            stack.pop_back();
            Block& prev = stack.back();
            prev.wv_sum += top.wv_sum;
            prev.w_sum += top.w_sum;
            prev.v_sum += top.v_sum;
            prev.count += top.count;
        }
    }
    std::size_t i = 0;
    for (const Block& b : stack) {
        const double v = level(b);
        for (std::size_t k = 0; k < b.count; ++k) values[i++] = v;
    }
}

}  // namespace detail

namespace {

void validate(const AuctionObservation& o) {
    if (!(o.bid > 0.0)) throw InvalidObservation("bid must be positive");
    if (o.auctions < 1) throw InvalidObservation("auctions must be at least 1");
    if (o.wins < 0 || o.wins > o.auctions) throw InvalidObservation("wins outside [0, auctions]");
    if (o.clicks < 0 || o.clicks > o.wins) throw InvalidObservation("clicks outside [0, wins]");
    if (!(o.ecpm_cost >= 0.0) || o.ecpm_cost > o.bid) {
        throw InvalidObservation("ecpm_cost outside [0, bid]");
    }
    if (!(o.ctr > 0.0) || o.ctr > 1.0) throw InvalidObservation("ctr outside (0, 1]");
}

// Linear interpolation over the landscape grid in one field, exact at grid
// bids, clamped beyond the ends.
double interp(const std::vector<LandscapePoint>& pts, Money bid,
              double LandscapePoint::*field) {
    auto it = std::lower_bound(pts.begin(), pts.end(), bid,
                               [](const LandscapePoint& p, Money b) { return p.bid < b; });
    if (it != pts.end() && it->bid == bid) return (*it).*field;
    if (it == pts.begin()) return pts.front().*field;
    if (it == pts.end()) return pts.back().*field;
    const LandscapePoint& hi = *it;
    const LandscapePoint& lo = *(it - 1);
    const double frac = (bid - lo.bid) / (hi.bid - lo.bid);
    return lo.*field + frac * (hi.*field - lo.*field);
}

void require_usable(const BidLandscape& l, Money bid) {
    if (l.points.empty()) throw EmptyLandscape("landscape has no points");
    if (!(bid > 0.0)) throw InvalidParams("bid must be positive");
}

}  // namespace

BidLandscape build_landscape(std::span<const AuctionObservation> rows) {
    if (rows.empty()) throw TooFewObservations("no observations");
    for (const AuctionObservation& o : rows) validate(o);
    for (const AuctionObservation& o : rows) {
        if (o.campaign_id != rows.front().campaign_id) {
            throw InconsistentCampaign("mixed campaign ids in one landscape");
        }
        if (o.ctr != rows.front().ctr) {
            throw InconsistentCampaign("mixed ctr values in one landscape");
        }
    }

    // Cent buckets: auction and win tallies, plus win-weighted price mass.
    struct Bucket {
        std::int64_t auctions = 0;
        std::int64_t wins = 0;
        double price_mass = 0.0;
    };
    std::map<std::int64_t, Bucket> buckets;
    for (const AuctionObservation& o : rows) {
        Bucket& b = buckets[std::llround(o.bid * 100.0)];
        b.auctions += o.auctions;
        b.wins += o.wins;
        b.price_mass += static_cast<double>(o.wins) * o.ecpm_cost;
    }
    if (buckets.size() < 4) {
        throw TooFewObservations("need at least 4 distinct bid buckets, have " +
                                 std::to_string(buckets.size()));
    }

    BidLandscape l;
    l.campaign_id = rows.front().campaign_id;
    l.ctr = rows.front().ctr;

    std::vector<double> win_rates, rate_weights, costs, cost_weights;
    for (const auto& [cents, b] : buckets) {
        LandscapePoint p;
        p.bid = static_cast<double>(cents) / 100.0;
        l.points.push_back(p);
        win_rates.push_back(static_cast<double>(b.wins) / static_cast<double>(b.auctions));
        rate_weights.push_back(static_cast<double>(b.auctions));
        costs.push_back(b.wins > 0 ? b.price_mass / static_cast<double>(b.wins) : 0.0);
        cost_weights.push_back(static_cast<double>(b.wins));
        l.impressions = std::max(l.impressions, b.auctions);
    }

    detail::pav_increasing(win_rates, rate_weights);
    detail::pav_increasing(costs, cost_weights);

    for (std::size_t i = 0; i < l.points.size(); ++i) {
        l.points[i].win_rate = win_rates[i];
        // Pooling can pull a price a hair above a low bucket's bid; cap it.
        // The cap of a non-decreasing series at a non-decreasing bound stays
        // non-decreasing.
        l.points[i].ecpm_cost = std::min(costs[i], l.points[i].bid);
    }
    return l;
}

double winrate_at(const BidLandscape& l, Money bid) {
    require_usable(l, bid);
    return interp(l.points, bid, &LandscapePoint::win_rate);
}

Money ecpm_cost_at(const BidLandscape& l, Money bid) {
    require_usable(l, bid);
    return interp(l.points, bid, &LandscapePoint::ecpm_cost);
}

double clicks_at(const BidLandscape& l, Money bid) {
    require_usable(l, bid);
    return static_cast<double>(l.impressions) * winrate_at(l, bid) * l.ctr;
}

Money spend_at(const BidLandscape& l, Money bid) {
    require_usable(l, bid);
    if (!(l.ctr > 0.0)) throw ZeroCtr("landscape ctr is zero");
    return clicks_at(l, bid) * ecpm_cost_at(l, bid) / (1000.0 * l.ctr);
}

ClickCostCurve click_cost_pairs(const BidLandscape& l) {
    if (l.points.empty()) throw EmptyLandscape("landscape has no points");
    ClickCostCurve curve;
    curve.ctr = l.ctr;
    curve.impressions = l.impressions;
    for (const LandscapePoint& p : l.points) {
        const double clicks = static_cast<double>(l.impressions) * p.win_rate * l.ctr;
        if (!curve.points.empty() && curve.points.back().ecpm_cost == p.ecpm_cost) {
            curve.points.back().clicks = std::max(curve.points.back().clicks, clicks);
        } else {
            curve.points.push_back({p.ecpm_cost, clicks});
        }
    }
    return curve;
}

}  // namespace bidcurve::landscape
