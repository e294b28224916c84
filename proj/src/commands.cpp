#include "bidcurve/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "bidcurve/curvefit.hpp"
#include "bidcurve/errors.hpp"
#include "bidcurve/io.hpp"
#include "bidcurve/kernels.hpp"
#include "bidcurve/landscape.hpp"
#include "bidcurve/metrics.hpp"
#include "bidcurve/recommend.hpp"
#include "bidcurve/simgen.hpp"

namespace bidcurve::commands {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string resolve_config_path(const RunManifest& m) {
    if (!m.config_path.empty()) return m.config_path;
    if (const char* env = std::getenv("BIDCURVE_CONFIG"); env && *env) return env;
    return "";
}

io::ConfigFile load_config(const RunManifest& m) {
    const std::string path = resolve_config_path(m);
    if (path.empty()) return {};
    return io::read_config_file(path);
}

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_json(const std::string& dir, const std::string& name, const ordered_json& j) {
    io::write_text_file((fs::path(dir) / name).string(), j.dump(2) + "\n");
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Per-campaign inputs shared by the pipeline commands.
struct Campaign {
    std::string id;
    std::vector<AuctionObservation> rows;
    BidLandscape land;
    ClickCostCurve curve;
    Money cur_bid = 0.0;
};

Campaign prepare(const std::string& id, std::vector<AuctionObservation> rows) {
    Campaign c;
    c.id = id;
    c.rows = std::move(rows);
    c.land = landscape::build_landscape(c.rows);
    c.curve = landscape::click_cost_pairs(c.land);
    c.cur_bid = current_bid(c.rows);
    return c;
}

std::map<std::string, std::vector<AuctionObservation>> load_campaigns(
    const RunManifest& m, std::ostream& log) {
    auto groups = io::group_by_campaign(io::read_observations_file(m.input_path));
    if (groups.empty()) log << "no campaigns in input\n";
    return groups;
}

const std::vector<ModelKind> kAllModels = {
    ModelKind::Sigmoid,         ModelKind::Power, ModelKind::MichaelisMenten,
    ModelKind::NegExp,          ModelKind::NearestNeighbor,
    ModelKind::LinearInterp,
};

}  // namespace

Money current_bid(std::span<const AuctionObservation> rows) {
    if (rows.empty()) throw TooFewObservations("no observations");
    std::map<std::int64_t, std::int64_t> volume;
    for (const AuctionObservation& o : rows) {
        volume[std::llround(o.bid * 100.0)] += o.auctions;
    }
    std::int64_t best = 0;
    for (const auto& [cents, v] : volume) best = std::max(best, v);
    std::vector<std::int64_t> tied;
    for (const auto& [cents, v] : volume) {
        if (v == best) tied.push_back(cents);
    }
    return static_cast<double>(tied[tied.size() / 2]) / 100.0;
}

void validate(const RunManifest& m) {
    if (m.output_dir.empty()) throw InvalidConfig("output path is required");
    if (m.command != Command::Simulate && m.input_path.empty()) {
        throw InvalidConfig("input path is required");
    }
    if (m.command == Command::Recommend) {
        if (!m.budget) throw InvalidConfig("recommend requires --budget");
        if (!(*m.budget > 0.0)) throw InvalidConfig("budget must be positive");
    } else if (m.budget) {
        throw InvalidConfig("--budget only applies to recommend");
    }
    if (m.seed && m.command != Command::Simulate) {
        throw InvalidConfig("--seed only applies to simulate");
    }
}

int cmd_fit(const RunManifest& m, std::ostream& log) {
    const io::ConfigFile cfg = load_config(m);
    const FitConfig fit_cfg = io::fit_config_from(cfg);
    auto groups = load_campaigns(m, log);
    if (groups.empty()) return 2;
    ensure_output_dir(m.output_dir);

    const std::vector<ModelKind>& models =
        m.models.empty() ? std::vector<ModelKind>{ModelKind::Sigmoid} : m.models;

    ordered_json fits = ordered_json::array();
    ordered_json lands = ordered_json::array();
    ordered_json errors = ordered_json::array();
    for (auto& [id, rows] : groups) {
        Campaign c;
        try {
            c = prepare(id, std::move(rows));
        } catch (const Error& e) {
            errors.push_back({{"campaign_id", id}, {"error", e.what()}});
            continue;
        }
        lands.push_back(io::landscape_json(c.land));
        for (ModelKind kind : models) {
            try {
                const FitResult fr = curvefit::fit(kind, c.curve, fit_cfg);
                ordered_json j = io::fit_json(fr);
                ordered_json row = {{"campaign_id", id}};
                row.update(j);
                fits.push_back(row);
            } catch (const Error& e) {
                errors.push_back(
                    {{"campaign_id", id}, {"kind", model_name(kind)}, {"error", e.what()}});
            }
        }
    }
    write_json(m.output_dir, "fits.json", {{"fits", fits}, {"errors", errors}});
    write_json(m.output_dir, "landscapes.json", lands);
    log << "fit: " << fits.size() << " fits, " << errors.size() << " errors\n";
    return errors.empty() ? 0 : 1;
}

int cmd_recommend(const RunManifest& m, std::ostream& log) {
    const io::ConfigFile cfg = load_config(m);
    const FitConfig fit_cfg = io::fit_config_from(cfg);
    auto groups = load_campaigns(m, log);
    if (groups.empty()) return 2;
    ensure_output_dir(m.output_dir);

    ordered_json recs = ordered_json::array();
    ordered_json errors = ordered_json::array();
    for (auto& [id, rows] : groups) {
        try {
            Campaign c = prepare(id, std::move(rows));
            const FitResult fr = curvefit::fit(ModelKind::Sigmoid, c.curve, fit_cfg);
            const Recommendation rec = recommend::recommend(
                fr, c.land, BudgetConstraint{*m.budget}, m.strategy, c.cur_bid);
            recs.push_back(io::recommendation_json(rec));

            // Plot-ready export: observed points with the fitted curve and
            // its slope, batch-evaluated over the observed costs.
            const SigmoidParams sp = fr.sigmoid();
            const std::size_t n = c.curve.points.size();
            std::vector<double> xs(n), fitted(n), slope(n);
            for (std::size_t i = 0; i < n; ++i) xs[i] = c.curve.points[i].ecpm_cost;
            kernels::logistic_value(sp.scale, sp.steepness, sp.shift, xs, fitted);
            kernels::logistic_slope(sp.scale, sp.steepness, sp.shift, xs, slope);
            std::ostringstream tsv;
            tsv << "cost\tobserved_clicks\tfitted_clicks\tfitted_derivative\n";
            for (std::size_t i = 0; i < n; ++i) {
                tsv << io::money3(xs[i]) << '\t' << fixed6(c.curve.points[i].clicks) << '\t'
                    << fixed6(fitted[i]) << '\t' << fixed6(slope[i]) << "\n";
            }
            io::write_text_file((fs::path(m.output_dir) / (id + ".curve.tsv")).string(),
                                tsv.str());
        } catch (const Error& e) {
            errors.push_back({{"campaign_id", id}, {"error", e.what()}});
        }
    }
    write_json(m.output_dir, "recommendations.json",
               {{"recommendations", recs}, {"errors", errors}});
    log << "recommend: " << recs.size() << " recommendations, " << errors.size()
        << " errors\n";
    if (recs.empty()) return 2;
    return errors.empty() ? 0 : 1;
}

int cmd_compare(const RunManifest& m, std::ostream& log) {
    const io::ConfigFile cfg = load_config(m);
    const FitConfig fit_cfg = io::fit_config_from(cfg);
    auto groups = load_campaigns(m, log);
    if (groups.empty()) return 2;
    ensure_output_dir(m.output_dir);

    const std::vector<ModelKind>& models = m.models.empty() ? kAllModels : m.models;
    const double huge_budget = std::numeric_limits<double>::infinity();
    const Strategy strategies[] = {Strategy::MaxClick, Strategy::MaxClick90,
                                   Strategy::Inflection, Strategy::Inflection90};

    std::ostringstream click_csv, spend_csv;
    click_csv << "campaign_id,model,mape,rmse,n\n";
    spend_csv << "campaign_id,model,mape,rmse,n\n";

    struct Acc {
        double ape_sum = 0, sq_sum = 0;
        int n = 0;
    };
    std::map<ModelKind, Acc> click_acc, spend_acc;
    struct StratAcc {
        double bir = 0, cir = 0, cyr = 0;
        int n = 0;
    };
    std::map<Strategy, StratAcc> strat_acc;
    ordered_json errors = ordered_json::array();
    int used = 0, skipped = 0;

    for (auto& [id, rows] : groups) {
        Campaign c;
        try {
            c = prepare(id, std::move(rows));
        } catch (const Error& e) {
            errors.push_back({{"campaign_id", id}, {"error", e.what()}});
            continue;
        }
        if (c.curve.points.size() < 5) {
            ++skipped;
            continue;
        }

        // Hold out the current-bid point; every model trains on the rest
        // and is scored on its prediction there.
        const Money held_cost = landscape::ecpm_cost_at(c.land, c.cur_bid);
        auto held_it =
            std::find_if(c.curve.points.begin(), c.curve.points.end(),
                         [&](const ClickCostPoint& p) { return p.ecpm_cost == held_cost; });
        if (held_it == c.curve.points.end()) {
            // The current bucket's cost merged away during pooling; fall
            // back to the median curve point.
            held_it = c.curve.points.begin() + c.curve.points.size() / 2;
        }
        const ClickCostPoint held = *held_it;
        const double spend_scale = 1.0 / (1000.0 * c.curve.ctr);
        if (!(held.clicks > 0.0) || !(held.ecpm_cost > 0.0)) {
            ++skipped;
            continue;
        }
        ClickCostCurve train = c.curve;
        train.points.erase(train.points.begin() + (held_it - c.curve.points.begin()));

        ++used;
        for (ModelKind kind : models) {
            try {
                const FitResult fr = curvefit::fit(kind, train, fit_cfg);
                const double pred_clicks = curvefit::predict(fr, held.ecpm_cost);
                const double pred_spend = curvefit::predict_spend(fr, held.ecpm_cost, c.curve.ctr);
                const double act_spend = held.clicks * held.ecpm_cost * spend_scale;
                const double click_ape = std::fabs(held.clicks - pred_clicks) / held.clicks;
                const double spend_ape = std::fabs(act_spend - pred_spend) / act_spend;
                click_csv << id << ',' << model_name(kind) << ',' << fixed6(click_ape) << ','
                          << fixed6(std::fabs(held.clicks - pred_clicks)) << ",1\n";
                spend_csv << id << ',' << model_name(kind) << ',' << fixed6(spend_ape) << ','
                          << fixed6(std::fabs(act_spend - pred_spend)) << ",1\n";
                click_acc[kind].ape_sum += click_ape;
                click_acc[kind].sq_sum += (held.clicks - pred_clicks) * (held.clicks - pred_clicks);
                click_acc[kind].n += 1;
                spend_acc[kind].ape_sum += spend_ape;
                spend_acc[kind].sq_sum += (act_spend - pred_spend) * (act_spend - pred_spend);
                spend_acc[kind].n += 1;
            } catch (const Error& e) {
                errors.push_back(
                    {{"campaign_id", id}, {"kind", model_name(kind)}, {"error", e.what()}});
            }
        }

        // Strategy lifts against the current operating point, from a fit on
        // the full curve and an unconstrained budget.
        try {
            const FitResult fr = curvefit::fit(ModelKind::Sigmoid, c.curve, fit_cfg);
            const Recommendation cur = recommend::recommend(
                fr, c.land, BudgetConstraint{huge_budget}, Strategy::NoOpt, c.cur_bid);
            for (Strategy s : strategies) {
                const Recommendation prop = recommend::recommend(
                    fr, c.land, BudgetConstraint{huge_budget}, s, c.cur_bid);
                const LiftRatios lr = metrics::lift_ratios(cur, prop, fr.sigmoid());
                strat_acc[s].bir += lr.bir;
                strat_acc[s].cir += lr.cir;
                strat_acc[s].cyr += lr.cyr_proposed;
                strat_acc[s].n += 1;
            }
        } catch (const Error& e) {
            errors.push_back({{"campaign_id", id}, {"kind", "strategy"}, {"error", e.what()}});
        }
    }

    io::write_text_file((fs::path(m.output_dir) / "eval_click.csv").string(), click_csv.str());
    io::write_text_file((fs::path(m.output_dir) / "eval_spend.csv").string(), spend_csv.str());

    std::ostringstream table;
    table << "strategy,mean_bir,mean_cir,mean_cyr\n";
    ordered_json strat_json = ordered_json::object();
    for (Strategy s : strategies) {
        const StratAcc& a = strat_acc[s];
        if (a.n == 0) continue;
        const double n = a.n;
        table << strategy_name(s) << ',' << fixed6(a.bir / n) << ',' << fixed6(a.cir / n)
              << ',' << fixed6(a.cyr / n) << "\n";
        strat_json[strategy_name(s)] = {
            {"mean_bir", a.bir / n}, {"mean_cir", a.cir / n}, {"mean_cyr", a.cyr / n}};
    }
    io::write_text_file((fs::path(m.output_dir) / "strategy_table.csv").string(), table.str());

    const auto acc_json = [](const std::map<ModelKind, Acc>& acc) {
        ordered_json out = ordered_json::object();
        for (const auto& [kind, a] : acc) {
            if (a.n == 0) continue;
            out[model_name(kind)] = {{"mape", a.ape_sum / a.n},
                                     {"rmse", std::sqrt(a.sq_sum / a.n)},
                                     {"n", a.n}};
        }
        return out;
    };
    write_json(m.output_dir, "summary.json",
               {{"campaigns", used},
                {"skipped", skipped},
                {"click", acc_json(click_acc)},
                {"spend", acc_json(spend_acc)},
                {"strategies", strat_json},
                {"errors", errors}});

    log << "compare: " << used << " campaigns, " << skipped << " skipped, "
        << errors.size() << " errors\n";
    if (used == 0) return 2;
    return errors.empty() ? 0 : 1;
}

int cmd_simulate(const RunManifest& m, std::ostream& log) {
    const io::ConfigFile cfg = load_config(m);
    MarketConfig base = io::market_config_from(cfg);
    if (m.seed) base.seed = *m.seed;
    const int n_campaigns = io::n_campaigns_from(cfg, 8);

    std::vector<AuctionObservation> all;
    for (int i = 0; i < n_campaigns; ++i) {
        MarketConfig mc = base;
        char idbuf[16];
        std::snprintf(idbuf, sizeof idbuf, "sim-%03d", i);
        mc.campaign_id = idbuf;
        mc.seed = base.seed + static_cast<std::uint64_t>(i);
        const auto rows = simgen::generate_campaign(mc);
        all.insert(all.end(), rows.begin(), rows.end());
    }

    if (m.output_dir == "-") {
        io::write_observations_csv(std::cout, all);
    } else {
        ensure_output_dir(m.output_dir);
        std::ostringstream csv;
        io::write_observations_csv(csv, all);
        io::write_text_file((fs::path(m.output_dir) / "observations.csv").string(), csv.str());
    }
    log << "simulate: " << n_campaigns << " campaigns, " << all.size() << " rows\n";
    return 0;
}

int run(const RunManifest& m, std::ostream& log) {
    validate(m);
    switch (m.command) {
        case Command::Fit: return cmd_fit(m, log);
        case Command::Recommend: return cmd_recommend(m, log);
        case Command::Compare: return cmd_compare(m, log);
        case Command::Simulate: return cmd_simulate(m, log);
    }
    return 2;
}

}  // namespace bidcurve::commands
