#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bidcurve/types.hpp"

namespace bidcurve::simgen {

// Deterministic random source. The generator is mt19937_64 and every
// distribution on top is spelled out here (rather than taken from
// <random>'s distribution classes, whose exact output is up to the standard
// library), so a seed produces the same stream on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on (0, 1], always positive so it can feed a log.
    double uniform01() {
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal, Box-Muller cosine branch, one fresh pair per call.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double lognormal(double mu, double sigma) {
        return std::exp(mu + sigma * normal());
    }

    // Bernoulli-sum binomial; n is small here (auctions per level).
    std::int64_t binomial(std::int64_t n, double p) {
        std::int64_t hits = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            if (uniform01() <= p) ++hits;
        }
        return hits;
    }

private:
    std::mt19937_64 eng_;
};

// Throws InvalidConfig on out-of-range fields (including bid levels closer
// than a cent, which would collide after bucketing).
void validate(const MarketConfig& cfg);

// Run a generalized second-price market over evenly spaced bid levels and
// log one observation row per level. Per auction, the campaign wins when
// its bid beats the best of `competitors_per_auction` lognormal competitor
// bids, and pays that second price. Clicks are binomial in wins with
// optional multiplicative lognormal noise, clamped back into [0, wins].
std::vector<AuctionObservation> generate_campaign(const MarketConfig& cfg);

// Sample the logistic click curve directly: n costs evenly spaced over
// (0, x_max], optional multiplicative lognormal click noise. The curve
// carries a nominal ctr of 0.001 and an impression count sized to the
// click asymptote.
ClickCostCurve ground_truth_curve(const SigmoidParams& sp, int n, double x_max,
                                  double noise_sd, std::uint64_t seed);

}  // namespace bidcurve::simgen
