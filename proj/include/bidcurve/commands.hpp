#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bidcurve/types.hpp"

namespace bidcurve::commands {

enum class Command { Fit, Recommend, Compare, Simulate };

// Everything one invocation needs, assembled by the CLI (or a test) and
// validated before any work starts.
struct RunManifest {
    Command command = Command::Fit;
    std::string input_path;             // observation CSV; "-" reads stdin
    std::string output_dir;             // results land here; "-" streams simulate's CSV
    std::string config_path;            // optional INI file; BIDCURVE_CONFIG fills it when unset
    std::optional<Money> budget;        // recommend only, must be positive there
    Strategy strategy = Strategy::Inflection;
    std::vector<ModelKind> models;      // fit/compare; empty means the command's default set
    std::optional<std::uint64_t> seed;  // simulate only, overrides the config seed
};

// Throws InvalidConfig when the manifest does not fit its command.
void validate(const RunManifest& m);

// Exit codes: 0 clean, 1 when some campaigns failed (results for the rest
// are still written), 2 when nothing could be processed at all.
int cmd_fit(const RunManifest& m, std::ostream& log);
int cmd_recommend(const RunManifest& m, std::ostream& log);
int cmd_compare(const RunManifest& m, std::ostream& log);
int cmd_simulate(const RunManifest& m, std::ostream& log);

// Validate and dispatch.
int run(const RunManifest& m, std::ostream& log);

// The bid level holding the most auction volume, ties resolved to the
// median tied level. Used as the campaign's current operating point.
Money current_bid(std::span<const AuctionObservation> rows);

}  // namespace bidcurve::commands
