#include "bidcurve/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "bidcurve/curvefit.hpp"
#include "bidcurve/errors.hpp"

namespace bidcurve::simgen {

void validate(const MarketConfig& cfg) {
    if (cfg.campaign_id.empty()) throw InvalidConfig("campaign_id is empty");
    if (cfg.n_bid_levels < 4) throw InvalidConfig("need at least 4 bid levels");
    if (cfg.auctions_per_level < 1) throw InvalidConfig("auctions_per_level must be at least 1");
    if (!(cfg.bid_min > 0.0)) throw InvalidConfig("bid_min must be positive");
    if (!(cfg.bid_max > cfg.bid_min)) throw InvalidConfig("bid_max must exceed bid_min");
    const double step = (cfg.bid_max - cfg.bid_min) / (cfg.n_bid_levels - 1);
    if (step < 0.01) throw InvalidConfig("bid levels closer than a cent collide");
    if (!std::isfinite(cfg.log_mean)) throw InvalidConfig("log_mean must be finite");
    if (!(cfg.log_sd >= 0.0)) throw InvalidConfig("log_sd must be non-negative");
    if (cfg.competitors_per_auction < 1) throw InvalidConfig("need at least 1 competitor");
    if (!(cfg.true_ctr > 0.0) || cfg.true_ctr > 1.0) throw InvalidConfig("true_ctr outside (0, 1]");
    if (!(cfg.noise_sd >= 0.0)) throw InvalidConfig("noise_sd must be non-negative");
}

std::vector<AuctionObservation> generate_campaign(const MarketConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);
    const double step = (cfg.bid_max - cfg.bid_min) / (cfg.n_bid_levels - 1);

    std::vector<AuctionObservation> rows;
    rows.reserve(cfg.n_bid_levels);
    for (int level = 0; level < cfg.n_bid_levels; ++level) {
        const Money bid =
            std::round((cfg.bid_min + step * level) * 100.0) / 100.0;

        std::int64_t wins = 0;
        double paid = 0.0;
        for (int a = 0; a < cfg.auctions_per_level; ++a) {
            double top_rival = 0.0;
            for (int c = 0; c < cfg.competitors_per_auction; ++c) {
                top_rival = std::max(top_rival, rng.lognormal(cfg.log_mean, cfg.log_sd));
            }
            if (bid > top_rival) {
                ++wins;
                paid += top_rival;  // second price
            }
        }

        std::int64_t clicks = rng.binomial(wins, cfg.true_ctr);
        if (cfg.noise_sd > 0.0) {
            clicks = std::llround(static_cast<double>(clicks) * rng.lognormal(0.0, cfg.noise_sd));
        }
        clicks = std::clamp<std::int64_t>(clicks, 0, wins);

        AuctionObservation o;
        o.campaign_id = cfg.campaign_id;
        o.bid = bid;
        o.auctions = cfg.auctions_per_level;
        o.wins = wins;
        o.clicks = clicks;
        o.ecpm_cost = wins > 0 ? paid / static_cast<double>(wins) : 0.0;
        o.ctr = cfg.true_ctr;
        rows.push_back(o);
    }
    return rows;
}

ClickCostCurve ground_truth_curve(const SigmoidParams& sp, int n, double x_max,
                                  double noise_sd, std::uint64_t seed) {
    if (!(sp.scale > 0.0) || !(sp.steepness > 0.0) || !std::isfinite(sp.shift)) {
        throw InvalidParams("sigmoid parameters out of domain");
    }
    if (n < 1) throw InvalidConfig("need at least 1 point");
    if (!(x_max > 0.0)) throw InvalidConfig("x_max must be positive");
    if (!(noise_sd >= 0.0)) throw InvalidConfig("noise_sd must be non-negative");

    Rng rng(seed);
    ClickCostCurve curve;
    curve.ctr = 0.001;
    curve.impressions = std::llround(std::ceil(sp.asymptote() / curve.ctr));
    curve.points.reserve(n);
    for (int i = 1; i <= n; ++i) {
        const double x = x_max * static_cast<double>(i) / static_cast<double>(n);
        double y = curvefit::sigmoid_value(sp, x);
        if (noise_sd > 0.0) y *= rng.lognormal(0.0, noise_sd);
        curve.points.push_back({x, y});
    }
    return curve;
}

}  // namespace bidcurve::simgen
