#include "bidcurve/recommend.hpp"

#include <algorithm>
#include <cmath>

#include "bidcurve/curvefit.hpp"
#include "bidcurve/errors.hpp"
#include "bidcurve/landscape.hpp"

namespace bidcurve::recommend {

namespace {

void check_sigmoid(const SigmoidParams& sp) {
    if (!(sp.scale > 0.0) || !(sp.steepness > 0.0) || !std::isfinite(sp.shift)) {
        throw InvalidParams("sigmoid parameters out of domain");
    }
}

Money lattice(std::int64_t i) { return static_cast<double>(i) * kCostStep; }

std::int64_t lattice_floor(Money c) {
    // The small slack keeps values that are a rounding error below a lattice
    // point (7.0 stored as 6.999999...) on that point.
    return static_cast<std::int64_t>(std::floor(c / kCostStep + 1e-9));
}

}  // namespace

Money inflection_cost(const SigmoidParams& sp) {
    check_sigmoid(sp);
    return std::max(sp.shift, 0.0) / sp.steepness;
}

Money inflection90_cost(const SigmoidParams& sp) {
    check_sigmoid(sp);
    const Money anchor = inflection_cost(sp);
    const double target = 0.9 * curvefit::sigmoid_slope(sp, anchor);

    // h' decreases monotonically to 0 right of the anchor, so a doubling
    // scan brackets the crossing and bisection pins it down.
    double width = 1.0 / sp.steepness;
    while (curvefit::sigmoid_slope(sp, anchor + width) >= target && width < 1e15) {
        width *= 2.0;
    }
    double lo = anchor, hi = anchor + width;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (curvefit::sigmoid_slope(sp, mid) >= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Money binary_search_cost(const std::function<Money(Money)>& spend_curve,
                         Money upper, Money budget) {
    if (!spend_curve) throw InvalidParams("spend curve is empty");
    if (!(upper >= 0.0)) throw InvalidParams("upper cost bound must be non-negative");
    if (!(budget > 0.0)) throw InvalidParams("budget must be positive");

    if (spend_curve(upper) <= budget) return upper;

    std::int64_t lo = 0, hi = lattice_floor(upper);
    while (lo <= hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (spend_curve(lattice(mid)) > budget) {
            hi = mid - 1;
        } else {
            lo = mid + 1;
        }
    }
    return hi >= 0 ? lattice(hi) : 0.0;
}

Money cost_to_bid(const BidLandscape& l, Money cost, bool* extrapolated) {
    if (l.points.empty()) throw EmptyLandscape("landscape has no points");
    if (!(cost >= 0.0)) throw InvalidParams("cost must be non-negative");
    if (extrapolated) *extrapolated = false;

    const auto& pts = l.points;
    if (cost <= pts.front().ecpm_cost) return pts.front().bid;
    auto it = std::lower_bound(pts.begin(), pts.end(), cost,
                               [](const LandscapePoint& p, Money c) { return p.ecpm_cost < c; });
    if (it == pts.end()) {
        if (extrapolated) *extrapolated = true;
        return pts.back().bid;
    }
    const LandscapePoint& hi = *it;
    const LandscapePoint& lo = *(it - 1);
    const double frac = (cost - lo.ecpm_cost) / (hi.ecpm_cost - lo.ecpm_cost);
    return lo.bid + frac * (hi.bid - lo.bid);
}

Money cpc_from_ecpm(Money ecpm_bid, double ctr) {
    if (!(ctr > 0.0)) throw ZeroCtr("ctr must be positive for a per-click bid");
    return ecpm_bid / (1000.0 * ctr);
}

Recommendation recommend(const FitResult& fit, const BidLandscape& l,
                         BudgetConstraint budget, Strategy strategy,
                         std::optional<Money> current_bid) {
    if (fit.kind != ModelKind::Sigmoid) {
        throw InvalidParams("recommendations require a sigmoid fit");
    }
    if (!fit.converged) throw NotConverged("sigmoid fit did not converge");
    if (l.points.empty()) throw EmptyLandscape("landscape has no points");
    if (!(budget.budget > 0.0)) throw InvalidParams("budget must be positive");

    const SigmoidParams sp = fit.sigmoid();
    check_sigmoid(sp);
    const double ctr = l.ctr;
    if (!(ctr > 0.0)) throw ZeroCtr("landscape ctr is zero");

    const auto spend_model = [&](Money c) {
        return curvefit::sigmoid_value(sp, c) * c / (1000.0 * ctr);
    };
    const double B = budget.budget;
    const Money max_cost = l.points.back().ecpm_cost;

    Recommendation rec;
    rec.campaign_id = l.campaign_id;
    rec.strategy = strategy;
    rec.budget = B;

    Money cost = 0.0;
    bool echo_bid = false;

    switch (strategy) {
        case Strategy::Inflection:
        case Strategy::Inflection90: {
            const Money want = strategy == Strategy::Inflection && sp.shift > 0.0
                                   ? inflection_cost(sp)
                                   : inflection90_cost(sp);
            if (spend_model(want) <= B) {
                cost = want;
            } else {
                cost = binary_search_cost(spend_model, want, B);
                rec.budget_binding = true;
            }
            break;
        }
        case Strategy::MaxClick: {
            rec.budget_binding = spend_model(max_cost) > B;
            cost = binary_search_cost(spend_model, max_cost, B);
            break;
        }
        case Strategy::MaxClick90: {
            rec.budget_binding = spend_model(max_cost) > B;
            const Money affordable = binary_search_cost(spend_model, max_cost, B);
            const double target = 0.9 * curvefit::sigmoid_value(sp, affordable);
            // Smallest lattice cost reaching 90% of the affordable maximum;
            // h is non-decreasing so the predicate is monotone.
            std::int64_t lo = 0, hi = lattice_floor(affordable);
            cost = affordable;
            while (lo <= hi) {
                const std::int64_t mid = lo + (hi - lo) / 2;
                if (curvefit::sigmoid_value(sp, lattice(mid)) >= target) {
                    cost = lattice(mid);
                    hi = mid - 1;
                } else {
                    lo = mid + 1;
                }
            }
            break;
        }
        case Strategy::NoOpt: {
            if (!current_bid) {
                throw InvalidParams("no-opt strategy needs the campaign's current bid");
            }
            const Money cur_cost = landscape::ecpm_cost_at(l, *current_bid);
            if (spend_model(cur_cost) <= B) {
                cost = cur_cost;
                echo_bid = true;
            } else {
                cost = binary_search_cost(spend_model, cur_cost, B);
                rec.budget_binding = true;
            }
            break;
        }
    }

    rec.ecpm_cost_star = cost;
    rec.bid_star_ecpm = echo_bid ? *current_bid : cost_to_bid(l, cost, &rec.extrapolated);
    rec.bid_star_cpc = cpc_from_ecpm(rec.bid_star_ecpm, ctr);
    rec.predicted_clicks = curvefit::sigmoid_value(sp, cost);
    rec.predicted_spend = spend_model(cost);
    return rec;
}

}  // namespace bidcurve::recommend
