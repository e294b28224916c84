#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bidcurve {

// Money values (bids, costs, spend) are plain doubles in dollars per mille
// unless a name says otherwise. The CPC conversion helpers are the only place
// the per-click unit appears.
using Money = double;

// One row of a campaign's auction log, aggregated per bid level.
struct AuctionObservation {
    std::string campaign_id;
    Money bid = 0.0;           // our eCPM bid at this level, > 0
    std::int64_t auctions = 0; // auctions entered at this bid, >= 1
    std::int64_t wins = 0;     // auctions won, 0 <= wins <= auctions
    std::int64_t clicks = 0;   // clicks observed, 0 <= clicks <= wins
    Money ecpm_cost = 0.0;     // mean price paid per won mille, 0 <= cost <= bid
    double ctr = 0.0;          // campaign click-through rate, in (0, 1]
};

// A single point of the monotone bid landscape grid.
struct LandscapePoint {
    Money bid = 0.0;
    double win_rate = 0.0; // in [0, 1], non-decreasing across the grid
    Money ecpm_cost = 0.0; // non-decreasing across the grid, <= bid
};

// Monotone win-rate and cost curves for one campaign, on a cent-bucketed
// bid grid, after isotonic repair.
struct BidLandscape {
    std::string campaign_id;
    std::vector<LandscapePoint> points; // sorted by bid, strictly increasing
    std::int64_t impressions = 0;       // auction volume scale for click counts
    double ctr = 0.0;                   // in (0, 1]
};

struct ClickCostPoint {
    Money ecpm_cost = 0.0;
    double clicks = 0.0;
};

// Clicks as a function of cost, the domain of all curve models. Points are
// sorted by cost, strictly increasing after deduplication.
struct ClickCostCurve {
    std::vector<ClickCostPoint> points;
    double ctr = 0.0;
    std::int64_t impressions = 0;
};

// Parameters of the constrained logistic click curve
//   h(x) = scale / (1 + exp(-(steepness * x - shift))) - offset()
// where offset() is pinned so that h(0) == 0 exactly.
struct SigmoidParams {
    double scale = 0.0;     // click asymptote numerator, > 0
    double steepness = 0.0; // growth rate per dollar of cost, > 0
    double shift = 0.0;     // horizontal placement, any real

    // Vertical offset implied by the h(0) == 0 constraint.
    double offset() const { return scale / (1.0 + std::exp(shift)); }
    // Click count approached as cost grows without bound.
    double asymptote() const { return scale - offset(); }
};

enum class ModelKind {
    Sigmoid,
    Power,           // clicks = coefficient * cost^exponent, 0 < exponent <= 1
    MichaelisMenten, // clicks = slope * cost / (1 + rate * cost)
    NegExp,          // clicks = ceiling * (1 - exp(-rate * cost))
    NearestNeighbor, // non-parametric, predicts the nearest stored point
    LinearInterp,    // non-parametric, interpolates between stored points
};

const char* model_name(ModelKind kind);
std::optional<ModelKind> model_from_name(const std::string& name);

// Result of fitting one model to one click-cost curve. For the parametric
// kinds `params` holds the coefficients in a fixed order (sigmoid:
// scale, steepness, shift; the two-parameter models: leading coefficient,
// then rate/exponent). The non-parametric kinds keep the training points
// instead and leave `params` empty.
struct FitResult {
    ModelKind kind = ModelKind::Sigmoid;
    std::vector<double> params;
    std::vector<ClickCostPoint> data; // retained for NearestNeighbor/LinearInterp
    double sse = 0.0;
    int iterations = 0;
    bool converged = false;
    int n_points = 0;

    SigmoidParams sigmoid() const; // throws InvalidParams unless kind == Sigmoid
};

struct FitConfig {
    double xi = 1e-5;         // relative SSE change below which iteration stops
    int max_iterations = 200;
    double damping0 = 1e-3;   // initial Levenberg damping
};

enum class Strategy {
    NoOpt,
    MaxClick,
    MaxClick90,
    Inflection,
    Inflection90,
};

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& name);

struct BudgetConstraint {
    Money budget = 0.0; // > 0
};

struct Recommendation {
    std::string campaign_id;
    Strategy strategy = Strategy::Inflection;
    Money ecpm_cost_star = 0.0;  // chosen operating cost
    Money bid_star_ecpm = 0.0;   // bid that lands on that cost
    Money bid_star_cpc = 0.0;    // same bid in per-click units
    double predicted_clicks = 0.0;
    Money predicted_spend = 0.0;
    Money budget = 0.0;
    bool budget_binding = false; // budget altered the chosen cost
    bool extrapolated = false;   // chosen cost lay beyond the landscape grid
};

// One row of a model evaluation report.
struct EvalReport {
    std::string campaign_id;
    ModelKind model = ModelKind::Sigmoid;
    double mape = 0.0;
    double rmse = 0.0;
    int n = 0;
};

// Finite-difference elasticities of the click/cost/spend system at one bid.
struct Elasticities {
    double alpha = 0.0;            // click-vs-cost elasticity
    double beta = 0.0;             // click-vs-spend elasticity
    double gamma = 0.0;            // marginal clicks per marginal cost dollar
    double gamma_lower_bound = 0.0;
};

struct LiftRatios {
    double bir = 0.0;         // relative bid increase, proposed vs current
    double cir = 0.0;         // relative click increase
    double cyr_current = 0.0; // click yield h'(cost) at the current point
    double cyr_proposed = 0.0;
};

// Synthetic market configuration for the auction simulator. Competitor bids
// are lognormal; our campaign sweeps `n_bid_levels` evenly spaced bid levels
// between bid_min and bid_max.
struct MarketConfig {
    std::string campaign_id = "sim-000";
    std::uint64_t seed = 1;
    int n_bid_levels = 30;
    int auctions_per_level = 2000;
    Money bid_min = 0.5;
    Money bid_max = 10.0;
    double log_mean = 0.5;            // competitor lognormal log-mean
    double log_sd = 0.5;              // competitor lognormal log-sd
    int competitors_per_auction = 5;
    double true_ctr = 0.1;
    double noise_sd = 0.0;            // multiplicative click-noise log-sd
};

}  // namespace bidcurve
