#include "bidcurve/metrics.hpp"

#include <cmath>
#include <string>

#include "bidcurve/curvefit.hpp"
#include "bidcurve/errors.hpp"
#include "bidcurve/landscape.hpp"

namespace bidcurve::metrics {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw LengthMismatch("actual and predicted differ in length");
    }
    if (actual.empty()) throw LengthMismatch("need at least one point");
}

// Forward-difference slope of the segment containing cost c. The last grid
// cost belongs to the final segment.
double segment_slope(const ClickCostCurve& curve, Money c) {
    const auto& pts = curve.points;
    if (pts.size() < 2) throw TooFewPoints("need at least 2 points for a slope");
    if (c < pts.front().ecpm_cost || c > pts.back().ecpm_cost) {
        throw OutOfRange("cost outside the curve's range");
    }
    std::size_t i = 0;
    while (i + 2 < pts.size() && pts[i + 1].ecpm_cost <= c) ++i;
    const double dx = pts[i + 1].ecpm_cost - pts[i].ecpm_cost;
    if (dx == 0.0) throw ZeroCostSpan("adjacent points share a cost");
    return (pts[i + 1].clicks - pts[i].clicks) / dx;
}

}  // namespace

double mape(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw ZeroActual(i, "actual value is zero at index " + std::to_string(i));
        acc += std::fabs(actual[i] - predicted[i]) / std::fabs(actual[i]);
    }
    return acc / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double r = actual[i] - predicted[i];
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(actual.size()));
}

Money naive_inflection(const ClickCostCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 2) throw TooFewPoints("need at least 2 points");
    double best_slope = 0.0;
    Money best_cost = 0.0;
    bool have = false;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double dx = pts[i + 1].ecpm_cost - pts[i].ecpm_cost;
        if (dx == 0.0) throw ZeroCostSpan("adjacent points share a cost");
        const double slope = (pts[i + 1].clicks - pts[i].clicks) / dx;
        if (!have || slope > best_slope) {
            best_slope = slope;
            best_cost = pts[i].ecpm_cost;
            have = true;
        }
    }
    return best_cost;
}

double diff_r(const ClickCostCurve& curve, Money naive_cost, Money curvefit_cost) {
    const double d_naive = segment_slope(curve, naive_cost);
    const double d_cf = segment_slope(curve, curvefit_cost);
    if (d_naive == 0.0) throw ZeroDerivative("empirical slope at the naive estimate is zero");
    return (d_naive - d_cf) / d_naive;
}

Elasticities elasticities(const FitResult& fit, const BidLandscape& l,
                            Money bid, Money delta) {
    if (fit.kind != ModelKind::Sigmoid) throw InvalidParams("elasticities require a sigmoid fit");
    if (!fit.converged) throw NotConverged("sigmoid fit did not converge");
    if (!(delta > 0.0) || !(delta < bid)) throw InvalidParams("delta must lie in (0, bid)");

    const double clicks = landscape::clicks_at(l, bid);
    const Money cost = landscape::ecpm_cost_at(l, bid);
    const double per_mille = 1.0 / (1000.0 * l.ctr);
    const Money spend = clicks * cost * per_mille;
    if (clicks <= 0.0 || cost <= 0.0 || spend <= 0.0) {
        throw ZeroDenominator("clicks, cost and spend must be positive at the bid");
    }

    const double d_clicks = landscape::clicks_at(l, bid + delta) - landscape::clicks_at(l, bid - delta);
    const Money d_cost = landscape::ecpm_cost_at(l, bid + delta) - landscape::ecpm_cost_at(l, bid - delta);
    // Differencing spend by the product rule, with clicks and cost at the
    // center, keeps the three elasticities algebraically consistent.
    const Money d_spend = per_mille * (d_cost * clicks + d_clicks * cost);
    if (d_cost == 0.0 || d_spend == 0.0) {
        throw ZeroDenominator("cost and spend must move across the stencil");
    }

    Elasticities q;
    q.alpha = (d_clicks / clicks) / (d_cost / cost);
    q.beta = (d_clicks / clicks) / (d_spend / spend);
    q.gamma = d_clicks / d_cost;
    const double mille_impressions = static_cast<double>(l.impressions) / 1000.0;
    q.gamma_lower_bound = q.alpha * mille_impressions * landscape::winrate_at(l, bid) / bid;
    return q;
}

LiftRatios lift_ratios(const Recommendation& current, const Recommendation& proposed,
                       const SigmoidParams& sp) {
    if (!(current.bid_star_ecpm > 0.0) || !(current.predicted_clicks > 0.0)) {
        throw ZeroCurrent("current bid and clicks must be positive");
    }
    LiftRatios r;
    r.bir = (proposed.bid_star_ecpm - current.bid_star_ecpm) / current.bid_star_ecpm;
    r.cir = (proposed.predicted_clicks - current.predicted_clicks) / current.predicted_clicks;
    r.cyr_current = curvefit::sigmoid_slope(sp, current.ecpm_cost_star);
    r.cyr_proposed = curvefit::sigmoid_slope(sp, proposed.ecpm_cost_star);
    return r;
}

}  // namespace bidcurve::metrics
