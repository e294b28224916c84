#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bidcurve/types.hpp"

namespace bidcurve::io {

// --- observation CSV ---
// Column set is fixed: campaign_id,bid,auctions,wins,clicks,ecpm_cost,ctr.
// Parse failures carry the 1-based line number in the message.
std::vector<AuctionObservation> read_observations_csv(std::istream& in);
std::vector<AuctionObservation> read_observations_file(const std::string& path);
void write_observations_csv(std::ostream& out, std::span<const AuctionObservation> rows);

// Split rows by campaign id, ordered by id.
std::map<std::string, std::vector<AuctionObservation>> group_by_campaign(
    std::span<const AuctionObservation> rows);

// --- JSON views ---
nlohmann::ordered_json landscape_json(const BidLandscape& l);
nlohmann::ordered_json fit_json(const FitResult& fit);
nlohmann::ordered_json recommendation_json(const Recommendation& rec);

// --- INI-style config ---
// Sections become key prefixes: `xi` under [fit] is stored as "fit.xi".
struct ConfigFile {
    std::map<std::string, std::string> entries;

    std::optional<std::string> get(const std::string& key) const;
};

ConfigFile read_config_file(const std::string& path);

// Fit settings from [fit] (or top-level) keys xi, max_iterations, damping0;
// anything absent keeps its default. Throws InvalidConfig on bad values.
FitConfig fit_config_from(const ConfigFile& cfg);

// Market settings from [simgen] keys, on top of the given defaults.
MarketConfig market_config_from(const ConfigFile& cfg, MarketConfig base = {});

// Campaign count for the simulate command, [simgen] n_campaigns.
int n_campaigns_from(const ConfigFile& cfg, int fallback);

// --- small helpers ---
// Fixed three decimals, the cost lattice's resolution.
std::string money3(Money v);
// Money rounded to the lattice for JSON output.
double money_round3(Money v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bidcurve::io
