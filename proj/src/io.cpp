#include "bidcurve/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bidcurve/errors.hpp"

namespace bidcurve::io {

namespace {

constexpr const char* kHeader = "campaign_id,bid,auctions,wins,clicks,ecpm_cost,ctr";

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& s, int line_no, const char* field) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + field + " value '" + s + "'");
    }
    return v;
}

std::int64_t parse_int(const std::string& s, int line_no, const char* field) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + field + " value '" + s + "'");
    }
    return v;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// Shortest float text that keeps ctr values like 0.001 readable.
std::string compact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::vector<AuctionObservation> read_observations_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("line 1: missing header");
    if (strip_cr(line) != kHeader) {
        throw ParseError(std::string("line 1: header must be exactly '") + kHeader + "'");
    }

    std::vector<AuctionObservation> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_commas(line);
        if (f.size() != 7) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 7 fields, got " +
                             std::to_string(f.size()));
        }
        AuctionObservation o;
        o.campaign_id = f[0];
        if (o.campaign_id.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty campaign_id");
        }
        o.bid = parse_double(f[1], line_no, "bid");
        o.auctions = parse_int(f[2], line_no, "auctions");
        o.wins = parse_int(f[3], line_no, "wins");
        o.clicks = parse_int(f[4], line_no, "clicks");
        o.ecpm_cost = parse_double(f[5], line_no, "ecpm_cost");
        o.ctr = parse_double(f[6], line_no, "ctr");

        if (!(o.bid > 0.0)) throw ParseError("line " + std::to_string(line_no) + ": bid must be positive");
        if (o.auctions < 1) throw ParseError("line " + std::to_string(line_no) + ": auctions must be at least 1");
        if (o.wins < 0 || o.wins > o.auctions) {
            throw ParseError("line " + std::to_string(line_no) + ": wins outside [0, auctions]");
        }
        if (o.clicks < 0 || o.clicks > o.wins) {
            throw ParseError("line " + std::to_string(line_no) + ": clicks outside [0, wins]");
        }
        if (!(o.ecpm_cost >= 0.0) || o.ecpm_cost > o.bid) {
            throw ParseError("line " + std::to_string(line_no) + ": ecpm_cost outside [0, bid]");
        }
        if (!(o.ctr > 0.0) || o.ctr > 1.0) {
            throw ParseError("line " + std::to_string(line_no) + ": ctr outside (0, 1]");
        }
        rows.push_back(std::move(o));
    }
    return rows;
}

std::vector<AuctionObservation> read_observations_file(const std::string& path) {
    if (path == "-") return read_observations_csv(std::cin);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file '" + path + "'");
    return read_observations_csv(in);
}

void write_observations_csv(std::ostream& out, std::span<const AuctionObservation> rows) {
    out << kHeader << "\n";
    for (const AuctionObservation& o : rows) {
        out << o.campaign_id << ',' << money3(o.bid) << ',' << o.auctions << ',' << o.wins
            << ',' << o.clicks << ',' << money3(o.ecpm_cost) << ',' << compact(o.ctr) << "\n";
    }
}

std::map<std::string, std::vector<AuctionObservation>> group_by_campaign(
    std::span<const AuctionObservation> rows) {
    std::map<std::string, std::vector<AuctionObservation>> by_id;
    for (const AuctionObservation& o : rows) by_id[o.campaign_id].push_back(o);
    return by_id;
}

nlohmann::ordered_json landscape_json(const BidLandscape& l) {
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const LandscapePoint& p : l.points) {
        points.push_back({{"bid", money_round3(p.bid)},
                          {"win_rate", p.win_rate},
                          {"ecpm_cost", money_round3(p.ecpm_cost)}});
    }
    return {{"campaign_id", l.campaign_id},
            {"ctr", l.ctr},
            {"impressions", l.impressions},
            {"points", points}};
}

nlohmann::ordered_json fit_json(const FitResult& fit) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    switch (fit.kind) {
        case ModelKind::Sigmoid:
            if (fit.params.size() == 3) {
                const SigmoidParams sp{fit.params[0], fit.params[1], fit.params[2]};
                params = {{"scale", sp.scale},
                          {"steepness", sp.steepness},
                          {"shift", sp.shift},
                          {"offset", sp.offset()}};
            }
            break;
        case ModelKind::Power:
            if (fit.params.size() == 2) {
                params = {{"coefficient", fit.params[0]}, {"exponent", fit.params[1]}};
            }
            break;
        case ModelKind::MichaelisMenten:
            if (fit.params.size() == 2) {
                params = {{"slope", fit.params[0]}, {"rate", fit.params[1]}};
            }
            break;
        case ModelKind::NegExp:
            if (fit.params.size() == 2) {
                params = {{"ceiling", fit.params[0]}, {"rate", fit.params[1]}};
            }
            break;
        default:
            break;
    }
    return {{"kind", model_name(fit.kind)},
            {"params", params},
            {"sse", fit.sse},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"n_points", fit.n_points}};
}

nlohmann::ordered_json recommendation_json(const Recommendation& rec) {
    return {{"campaign_id", rec.campaign_id},
            {"strategy", strategy_name(rec.strategy)},
            {"ecpm_cost_star", money_round3(rec.ecpm_cost_star)},
            {"bid_star_ecpm", money_round3(rec.bid_star_ecpm)},
            {"bid_star_cpc", money_round3(rec.bid_star_cpc)},
            {"predicted_clicks", rec.predicted_clicks},
            {"predicted_spend", money_round3(rec.predicted_spend)},
            {"budget", money_round3(rec.budget)},
            {"budget_binding", rec.budget_binding},
            {"extrapolated", rec.extrapolated}};
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    return it->second;
}

ConfigFile read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    ConfigFile cfg;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_cr(line));
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError("config line " + std::to_string(line_no) + ": unterminated section");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.entries[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

namespace {

std::optional<std::string> get_scoped(const ConfigFile& cfg, const std::string& section,
                                      const std::string& key) {
    if (auto v = cfg.get(section + "." + key)) return v;
    return cfg.get(key);
}

double config_double(const std::string& key, const std::string& raw) {
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw InvalidConfig("config key '" + key + "' has a bad numeric value '" + raw + "'");
    }
}

int config_int(const std::string& key, const std::string& raw) {
    const double v = config_double(key, raw);
    if (v != std::floor(v) || std::fabs(v) > 1e18) {
        throw InvalidConfig("config key '" + key + "' must be an integer, got '" + raw + "'");
    }
    return static_cast<int>(v);
}

}  // namespace

FitConfig fit_config_from(const ConfigFile& cfg) {
    FitConfig fc;
    if (auto v = get_scoped(cfg, "fit", "xi")) {
        fc.xi = config_double("xi", *v);
        if (!(fc.xi > 0.0)) throw InvalidConfig("xi must be positive");
    }
    if (auto v = get_scoped(cfg, "fit", "max_iterations")) {
        fc.max_iterations = config_int("max_iterations", *v);
        if (fc.max_iterations < 1) throw InvalidConfig("max_iterations must be at least 1");
    }
    if (auto v = get_scoped(cfg, "fit", "damping0")) {
        fc.damping0 = config_double("damping0", *v);
        if (!(fc.damping0 > 0.0)) throw InvalidConfig("damping0 must be positive");
    }
    return fc;
}

MarketConfig market_config_from(const ConfigFile& cfg, MarketConfig base) {
    const auto num = [&](const char* key) -> std::optional<double> {
        if (auto v = cfg.get(std::string("simgen.") + key)) return config_double(key, *v);
        return std::nullopt;
    };
    const auto integer = [&](const char* key) -> std::optional<int> {
        if (auto v = cfg.get(std::string("simgen.") + key)) return config_int(key, *v);
        return std::nullopt;
    };
    if (auto v = integer("n_bid_levels")) base.n_bid_levels = *v;
    if (auto v = integer("auctions_per_level")) base.auctions_per_level = *v;
    if (auto v = num("bid_min")) base.bid_min = *v;
    if (auto v = num("bid_max")) base.bid_max = *v;
    if (auto v = num("log_mean")) base.log_mean = *v;
    if (auto v = num("log_sd")) base.log_sd = *v;
    if (auto v = integer("competitors_per_auction")) base.competitors_per_auction = *v;
    if (auto v = num("true_ctr")) base.true_ctr = *v;
    if (auto v = num("noise_sd")) base.noise_sd = *v;
    if (auto v = integer("seed")) base.seed = static_cast<std::uint64_t>(*v);
    return base;
}

int n_campaigns_from(const ConfigFile& cfg, int fallback) {
    if (auto v = cfg.get("simgen.n_campaigns")) {
        const int n = config_int("n_campaigns", *v);
        if (n < 1) throw InvalidConfig("n_campaigns must be at least 1");
        return n;
    }
    return fallback;
}

std::string money3(Money v) {
    if (std::fabs(v) < 5e-4) v = 0.0;  // avoid "-0.000"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

double money_round3(Money v) {
    const double r = std::round(v * 1000.0) / 1000.0;
    return r == 0.0 ? 0.0 : r;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing file '" + path + "'");
}

}  // namespace bidcurve::io
