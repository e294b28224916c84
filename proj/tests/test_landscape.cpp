#include <doctest.h>

#include <random>
#include <vector>

#include "bidcurve/errors.hpp"
#include "bidcurve/landscape.hpp"

using namespace bidcurve;

namespace {

AuctionObservation row(const std::string& id, Money bid, std::int64_t auctions,
                       std::int64_t wins, std::int64_t clicks, Money cost, double ctr) {
    return {id, bid, auctions, wins, clicks, cost, ctr};
}

// Four clean monotone buckets plus a duplicate row for the first one.
std::vector<AuctionObservation> clean_rows() {
    return {
        row("c1", 1.00, 1000, 100, 5, 0.50, 0.001),
        row("c1", 1.00, 1000, 300, 10, 0.70, 0.001),
        row("c1", 2.00, 2000, 1000, 30, 1.00, 0.001),
        row("c1", 3.00, 2000, 1400, 40, 1.40, 0.001),
        row("c1", 4.00, 2000, 1800, 50, 1.80, 0.001),
    };
}

}  // namespace

TEST_CASE("build_landscape aggregates cent buckets") {
    const auto rows = clean_rows();
    BidLandscape l = landscape::build_landscape(rows);
    REQUIRE(l.points.size() == 4);
    CHECK(l.campaign_id == "c1");
    CHECK(l.ctr == 0.001);
    CHECK(l.impressions == 2000);

    // Two rows at bid 1.00 pool into one bucket: 400 wins over 2000 auctions,
    // price (100*0.50 + 300*0.70) / 400.
    CHECK(l.points[0].bid == 1.00);
    CHECK(l.points[0].win_rate == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(l.points[0].ecpm_cost == doctest::Approx(0.65).epsilon(1e-15));
    CHECK(l.points[3].win_rate == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(l.points[3].ecpm_cost == doctest::Approx(1.8).epsilon(1e-15));
}

TEST_CASE("pav pools a simple descending pair") {
    std::vector<double> v = {0.9, 0.7};
    std::vector<double> w = {1.0, 1.0};
    landscape::detail::pav_increasing(v, w);
    CHECK(v[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("pav respects weights and leaves sorted data alone") {
    std::vector<double> v = {0.9, 0.6};
    std::vector<double> w = {1.0, 3.0};
    landscape::detail::pav_increasing(v, w);
    CHECK(v[0] == doctest::Approx(0.675).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(0.675).epsilon(1e-15));

    std::vector<double> sorted = {0.1, 0.2, 0.2, 0.9};
    std::vector<double> ones(4, 1.0);
    landscape::detail::pav_increasing(sorted, ones);
    CHECK(sorted == std::vector<double>{0.1, 0.2, 0.2, 0.9});
}

TEST_CASE("pav handles an interior violation and zero-weight blocks") {
    std::vector<double> v = {0.1, 0.9, 0.7, 0.95};
    std::vector<double> w = {1.0, 1.0, 1.0, 1.0};
    landscape::detail::pav_increasing(v, w);
    CHECK(v[0] == doctest::Approx(0.1));
    CHECK(v[1] == doctest::Approx(0.8));
    CHECK(v[2] == doctest::Approx(0.8));
    CHECK(v[3] == doctest::Approx(0.95));

    // All-zero weights fall back to plain means.
    std::vector<double> z = {0.5, 0.2};
    std::vector<double> zw = {0.0, 0.0};
    landscape::detail::pav_increasing(z, zw);
    CHECK(z[0] == doctest::Approx(0.35));
    CHECK(z[1] == doctest::Approx(0.35));
}

TEST_CASE("landscape repairs a non-monotone win-rate series") {
    std::vector<AuctionObservation> rows = {
        row("c1", 1.00, 1000, 100, 1, 0.50, 0.01),
        row("c1", 2.00, 1000, 900, 9, 1.00, 0.01),
        row("c1", 3.00, 1000, 700, 7, 1.50, 0.01),
        row("c1", 4.00, 1000, 950, 9, 2.00, 0.01),
    };
    BidLandscape l = landscape::build_landscape(rows);
    CHECK(l.points[0].win_rate == doctest::Approx(0.1));
    CHECK(l.points[1].win_rate == doctest::Approx(0.8));
    CHECK(l.points[2].win_rate == doctest::Approx(0.8));
    CHECK(l.points[3].win_rate == doctest::Approx(0.95));
    // Costs were monotone already and keep their values.
    CHECK(l.points[1].ecpm_cost == doctest::Approx(1.0));
}

TEST_CASE("landscape repairs costs weighted by wins") {
    std::vector<AuctionObservation> rows = {
        row("c1", 1.00, 1000, 100, 1, 0.90, 0.01),
        row("c1", 2.00, 1000, 300, 3, 0.60, 0.01),
        row("c1", 3.00, 1000, 400, 4, 0.80, 0.01),
        row("c1", 4.00, 1000, 400, 4, 0.90, 0.01),
    };
    BidLandscape l = landscape::build_landscape(rows);
    // (0.90*100 + 0.60*300) / 400 = 0.675 for the pooled pair.
    CHECK(l.points[0].ecpm_cost == doctest::Approx(0.675));
    CHECK(l.points[1].ecpm_cost == doctest::Approx(0.675));
    CHECK(l.points[2].ecpm_cost == doctest::Approx(0.80));
    CHECK(l.points[3].ecpm_cost == doctest::Approx(0.90));
}

TEST_CASE("zero-win buckets keep a defined cost") {
    std::vector<AuctionObservation> rows = {
        row("c1", 1.00, 1000, 0, 0, 0.00, 0.01),
        row("c1", 2.00, 1000, 0, 0, 0.00, 0.01),
        row("c1", 3.00, 1000, 500, 5, 1.20, 0.01),
        row("c1", 4.00, 1000, 800, 8, 1.60, 0.01),
    };
    BidLandscape l = landscape::build_landscape(rows);
    CHECK(l.points[0].win_rate == 0.0);
    CHECK(l.points[0].ecpm_cost == 0.0);
    CHECK(l.points[2].ecpm_cost == doctest::Approx(1.2));
}

TEST_CASE("interpolation is exact at grid bids and clamped outside") {
    BidLandscape l = landscape::build_landscape(clean_rows());
    CHECK(landscape::winrate_at(l, 3.00) == l.points[2].win_rate);
    CHECK(landscape::winrate_at(l, 2.50) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(landscape::ecpm_cost_at(l, 2.50) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(landscape::winrate_at(l, 0.10) == doctest::Approx(0.2));
    CHECK(landscape::winrate_at(l, 99.0) == doctest::Approx(0.9));
}

TEST_CASE("clicks and spend formulas") {
    BidLandscape l;
    l.campaign_id = "fig";
    l.ctr = 0.001;
    l.impressions = 1000000;
    l.points = {{1.0, 0.40, 0.90}, {2.0, 0.81, 1.50}, {3.0, 0.90, 1.80}, {4.0, 0.95, 2.10}};
    CHECK(landscape::clicks_at(l, 2.0) == doctest::Approx(810.0).epsilon(1e-12));
    // spend = clicks * cost / (1000 * ctr) = 810 * 1.50 / 1 = 1215.
    CHECK(landscape::spend_at(l, 2.0) == doctest::Approx(1215.0).epsilon(1e-12));
}

TEST_CASE("click_cost_pairs collapses tied costs to the best clicks") {
    BidLandscape l;
    l.campaign_id = "c";
    l.ctr = 0.1;
    l.impressions = 1000;
    l.points = {{1.0, 0.2, 0.5}, {2.0, 0.4, 0.5}, {3.0, 0.7, 0.9}};
    ClickCostCurve curve = landscape::click_cost_pairs(l);
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[0].ecpm_cost == 0.5);
    CHECK(curve.points[0].clicks == doctest::Approx(40.0));
    CHECK(curve.points[1].ecpm_cost == 0.9);
    CHECK(curve.points[1].clicks == doctest::Approx(70.0));
    CHECK(curve.ctr == 0.1);
    CHECK(curve.impressions == 1000);
}

TEST_CASE("random landscapes come out monotone with costs under bids") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> cents(10, 900);
    std::uniform_int_distribution<std::int64_t> auc(1, 5000);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<AuctionObservation> rows;
        const int n = 4 + static_cast<int>(rng() % 20);
        for (int i = 0; i < n; ++i) {
            const Money bid = cents(rng) / 100.0;
            const std::int64_t a = auc(rng);
            std::uniform_int_distribution<std::int64_t> wd(0, a);
            const std::int64_t w = wd(rng);
            std::uniform_int_distribution<std::int64_t> cd(0, w);
            std::uniform_real_distribution<double> price(0.0, bid);
            rows.push_back(row("r", bid, a, w, cd(rng), w > 0 ? price(rng) : 0.0, 0.05));
        }
        BidLandscape l;
        try {
            l = landscape::build_landscape(rows);
        } catch (const TooFewObservations&) {
            continue;  // duplicate cents can shrink the grid below 4
        }
        for (std::size_t i = 0; i < l.points.size(); ++i) {
            CHECK(l.points[i].ecpm_cost <= l.points[i].bid);
            CHECK(l.points[i].win_rate >= 0.0);
            CHECK(l.points[i].win_rate <= 1.0);
            if (i > 0) {
                CHECK(l.points[i].bid > l.points[i - 1].bid);
                CHECK(l.points[i].win_rate >= l.points[i - 1].win_rate);
                CHECK(l.points[i].ecpm_cost >= l.points[i - 1].ecpm_cost);
            }
        }
    }
}

TEST_CASE("landscape input validation") {
    CHECK_THROWS_AS(landscape::build_landscape({}), TooFewObservations);

    std::vector<AuctionObservation> three = {
        row("c", 1.0, 10, 5, 1, 0.5, 0.01),
        row("c", 2.0, 10, 6, 1, 0.6, 0.01),
        row("c", 3.0, 10, 7, 1, 0.7, 0.01),
    };
    CHECK_THROWS_AS(landscape::build_landscape(three), TooFewObservations);

    auto mixed_id = clean_rows();
    mixed_id[2].campaign_id = "other";
    CHECK_THROWS_AS(landscape::build_landscape(mixed_id), InconsistentCampaign);

    auto mixed_ctr = clean_rows();
    mixed_ctr[2].ctr = 0.002;
    CHECK_THROWS_AS(landscape::build_landscape(mixed_ctr), InconsistentCampaign);

    auto bad_wins = clean_rows();
    bad_wins[0].wins = bad_wins[0].auctions + 1;
    CHECK_THROWS_AS(landscape::build_landscape(bad_wins), InvalidObservation);

    auto bad_clicks = clean_rows();
    bad_clicks[0].clicks = bad_clicks[0].wins + 1;
    CHECK_THROWS_AS(landscape::build_landscape(bad_clicks), InvalidObservation);

    auto bad_cost = clean_rows();
    bad_cost[0].ecpm_cost = bad_cost[0].bid + 0.01;
    CHECK_THROWS_AS(landscape::build_landscape(bad_cost), InvalidObservation);

    auto bad_ctr = clean_rows();
    bad_ctr[0].ctr = 0.0;
    CHECK_THROWS_AS(landscape::build_landscape(bad_ctr), InvalidObservation);

    BidLandscape empty;
    CHECK_THROWS_AS(landscape::winrate_at(empty, 1.0), EmptyLandscape);
    BidLandscape l = landscape::build_landscape(clean_rows());
    CHECK_THROWS_AS(landscape::winrate_at(l, 0.0), InvalidParams);
    CHECK_THROWS_AS(landscape::winrate_at(l, -1.0), InvalidParams);
}
