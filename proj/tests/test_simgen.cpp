#include <doctest.h>

#include <cmath>
#include <vector>

#include "bidcurve/curvefit.hpp"
#include "bidcurve/errors.hpp"
#include "bidcurve/simgen.hpp"

using namespace bidcurve;

namespace {

bool rows_equal(const std::vector<AuctionObservation>& a,
                const std::vector<AuctionObservation>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].campaign_id != b[i].campaign_id || a[i].bid != b[i].bid ||
            a[i].auctions != b[i].auctions || a[i].wins != b[i].wins ||
            a[i].clicks != b[i].clicks || a[i].ecpm_cost != b[i].ecpm_cost ||
            a[i].ctr != b[i].ctr) {
            return false;
        }
    }
    return true;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("rng streams are reproducible and in range") {
    simgen::Rng a(42), b(42), c(43);
    bool all_equal = true, any_differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double ua = a.uniform01();
        const double ub = b.uniform01();
        const double uc = c.uniform01();
        CHECK(ua > 0.0);
        CHECK(ua <= 1.0);
        all_equal = all_equal && ua == ub;
        any_differs = any_differs || ua != uc;
    }
    CHECK(all_equal);
    CHECK(any_differs);
}

TEST_CASE("rng distributions behave") {
    simgen::Rng r(7);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += r.uniform01();
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));

    simgen::Rng rn(8);
    double nsum = 0.0, nsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rn.normal();
        CHECK(std::isfinite(z));
        nsum += z;
        nsq += z * z;
    }
    CHECK(nsum / n == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
    CHECK(nsq / n == doctest::Approx(1.0).epsilon(0.03));

    simgen::Rng rb(9);
    CHECK(rb.binomial(500, 1.0) == 500);
    const std::int64_t k = rb.binomial(500, 0.3);
    CHECK(k >= 0);
    CHECK(k <= 500);
    CHECK(rb.lognormal(0.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("generate_campaign is deterministic in the seed") {
    MarketConfig cfg;
    cfg.campaign_id = "det";
    cfg.seed = 11;
    cfg.auctions_per_level = 300;
    auto r1 = simgen::generate_campaign(cfg);
    auto r2 = simgen::generate_campaign(cfg);
    CHECK(rows_equal(r1, r2));

    cfg.seed = 12;
    auto r3 = simgen::generate_campaign(cfg);
    CHECK(!rows_equal(r1, r3));
}

TEST_CASE("generated rows satisfy the log invariants") {
    MarketConfig cfg;
    cfg.campaign_id = "inv";
    cfg.seed = 5;
    cfg.noise_sd = 0.2;
    auto rows = simgen::generate_campaign(cfg);
    REQUIRE(static_cast<int>(rows.size()) == cfg.n_bid_levels);
    const double step = (cfg.bid_max - cfg.bid_min) / (cfg.n_bid_levels - 1);
    for (int i = 0; i < cfg.n_bid_levels; ++i) {
        const AuctionObservation& o = rows[i];
        CHECK(o.campaign_id == "inv");
        CHECK(o.bid ==
              std::round((cfg.bid_min + step * i) * 100.0) / 100.0);
        CHECK(o.auctions == cfg.auctions_per_level);
        CHECK(o.wins >= 0);
        CHECK(o.wins <= o.auctions);
        CHECK(o.clicks >= 0);
        CHECK(o.clicks <= o.wins);
        CHECK(o.ecpm_cost >= 0.0);
        if (o.wins > 0) CHECK(o.ecpm_cost < o.bid);
        CHECK(o.ctr == cfg.true_ctr);
    }
}

TEST_CASE("a dominant bidder wins everything and pays under its bid") {
    MarketConfig cfg;
    cfg.campaign_id = "dom";
    cfg.seed = 3;
    cfg.bid_min = 50.0;
    cfg.bid_max = 60.0;
    cfg.log_mean = -2.0;
    cfg.log_sd = 0.1;
    cfg.auctions_per_level = 500;
    cfg.true_ctr = 1.0;
    auto rows = simgen::generate_campaign(cfg);
    for (const AuctionObservation& o : rows) {
        CHECK(o.wins == o.auctions);
        CHECK(o.clicks == o.wins);  // ctr 1, no noise
        // Second price is a competitor bid, near exp(-2).
        CHECK(o.ecpm_cost < 1.0);
        CHECK(o.ecpm_cost > 0.0);
    }
}

TEST_CASE("win rates track the order-statistic curve") {
    MarketConfig cfg;
    cfg.campaign_id = "wr";
    cfg.seed = 21;
    auto rows = simgen::generate_campaign(cfg);
    for (const AuctionObservation& o : rows) {
        // P(win) = Phi((ln b - mu)/sigma)^k for the max of k lognormals.
        const double z = (std::log(o.bid) - cfg.log_mean) / cfg.log_sd;
        const double p = std::pow(normal_cdf(z), cfg.competitors_per_auction);
        const double wr = static_cast<double>(o.wins) / static_cast<double>(o.auctions);
        const double se =
            std::sqrt(std::max(p * (1.0 - p), 1e-12) / cfg.auctions_per_level);
        CHECK(std::fabs(wr - p) <= 5.0 * se + 1e-3);
    }
}

TEST_CASE("click totals track the configured ctr") {
    MarketConfig cfg;
    cfg.campaign_id = "ctr";
    cfg.seed = 31;
    cfg.true_ctr = 0.1;
    auto rows = simgen::generate_campaign(cfg);
    std::int64_t wins = 0, clicks = 0;
    for (const AuctionObservation& o : rows) {
        wins += o.wins;
        clicks += o.clicks;
    }
    REQUIRE(wins > 1000);
    const double rate = static_cast<double>(clicks) / static_cast<double>(wins);
    const double se = std::sqrt(0.1 * 0.9 / static_cast<double>(wins));
    CHECK(std::fabs(rate - 0.1) <= 5.0 * se);
}

TEST_CASE("ground truth curves sample the logistic exactly when noiseless") {
    SigmoidParams sp{1000.0, 2.0, 4.0};
    ClickCostCurve c = simgen::ground_truth_curve(sp, 25, 5.0, 0.0, 1);
    REQUIRE(c.points.size() == 25);
    CHECK(c.ctr == 0.001);
    CHECK(c.impressions == std::llround(std::ceil(sp.asymptote() / 0.001)));
    for (int i = 1; i <= 25; ++i) {
        const ClickCostPoint& p = c.points[i - 1];
        CHECK(p.ecpm_cost == doctest::Approx(5.0 * i / 25.0).epsilon(1e-15));
        CHECK(p.clicks == curvefit::sigmoid_value(sp, p.ecpm_cost));
    }

    ClickCostCurve n1 = simgen::ground_truth_curve(sp, 25, 5.0, 0.1, 9);
    ClickCostCurve n2 = simgen::ground_truth_curve(sp, 25, 5.0, 0.1, 9);
    bool identical = true, differs_from_clean = false;
    for (int i = 0; i < 25; ++i) {
        identical = identical && n1.points[i].clicks == n2.points[i].clicks;
        differs_from_clean =
            differs_from_clean || n1.points[i].clicks != c.points[i].clicks;
        CHECK(n1.points[i].clicks >= 0.0);
    }
    CHECK(identical);
    CHECK(differs_from_clean);
}

TEST_CASE("simulator configuration validation") {
    MarketConfig ok;
    CHECK_NOTHROW(simgen::validate(ok));

    MarketConfig bad = ok;
    bad.n_bid_levels = 3;
    CHECK_THROWS_AS(simgen::validate(bad), InvalidConfig);
    bad = ok;
    bad.bid_max = bad.bid_min;
    CHECK_THROWS_AS(simgen::validate(bad), InvalidConfig);
    bad = ok;
    bad.n_bid_levels = 2000;  // levels collide after cent rounding
    CHECK_THROWS_AS(simgen::validate(bad), InvalidConfig);
    bad = ok;
    bad.true_ctr = 0.0;
    CHECK_THROWS_AS(simgen::validate(bad), InvalidConfig);
    bad = ok;
    bad.competitors_per_auction = 0;
    CHECK_THROWS_AS(simgen::validate(bad), InvalidConfig);
    bad = ok;
    bad.auctions_per_level = 0;
    CHECK_THROWS_AS(simgen::validate(bad), InvalidConfig);
    bad = ok;
    bad.campaign_id.clear();
    CHECK_THROWS_AS(simgen::validate(bad), InvalidConfig);

    SigmoidParams sp{1000.0, 2.0, 4.0};
    CHECK_THROWS_AS(simgen::ground_truth_curve(sp, 0, 5.0, 0.0, 1), InvalidConfig);
    CHECK_THROWS_AS(simgen::ground_truth_curve(sp, 5, 0.0, 0.0, 1), InvalidConfig);
    CHECK_THROWS_AS(simgen::ground_truth_curve(sp, 5, 5.0, -0.1, 1), InvalidConfig);
    CHECK_THROWS_AS(simgen::ground_truth_curve({0.0, 1.0, 1.0}, 5, 5.0, 0.0, 1),
                    InvalidParams);
}
