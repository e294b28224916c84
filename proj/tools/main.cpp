#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bidcurve/commands.hpp"
#include "bidcurve/errors.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t pos = s.find(',', start);
        if (pos == std::string::npos) {
            if (start < s.size()) out.push_back(s.substr(start));
            break;
        }
        if (pos > start) out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace bidcurve;

    CLI::App app{"click-vs-cost curve fitting and bid recommendation"};
    app.require_subcommand(1);

    commands::RunManifest mf;
    std::string strategy_str = "ip";
    std::string models_str;
    double budget_val = 0.0;
    std::uint64_t seed_val = 0;

    CLI::App* fit = app.add_subcommand("fit", "fit click-cost models per campaign");
    fit->add_option("--input", mf.input_path, "observation CSV, '-' for stdin")->required();
    fit->add_option("--output", mf.output_dir, "output directory")->required();
    fit->add_option("--config", mf.config_path, "INI config file");
    fit->add_option("--models", models_str, "comma list of sigmoid,power,mm,negexp,nns,li");

    CLI::App* rec = app.add_subcommand("recommend", "recommend a bid per campaign");
    rec->add_option("--input", mf.input_path, "observation CSV, '-' for stdin")->required();
    rec->add_option("--output", mf.output_dir, "output directory")->required();
    rec->add_option("--config", mf.config_path, "INI config file");
    rec->add_option("--budget", budget_val, "spend budget per campaign")->required();
    rec->add_option("--strategy", strategy_str, "bidding strategy")
        ->check(CLI::IsMember({"no-opt", "mc", "mc90", "ip", "ip90"}));

    CLI::App* cmp = app.add_subcommand("compare", "hold-out model comparison per campaign");
    cmp->add_option("--input", mf.input_path, "observation CSV, '-' for stdin")->required();
    cmp->add_option("--output", mf.output_dir, "output directory")->required();
    cmp->add_option("--config", mf.config_path, "INI config file");
    cmp->add_option("--models", models_str, "comma list of sigmoid,power,mm,negexp,nns,li");

    CLI::App* sim = app.add_subcommand("simulate", "generate synthetic auction logs");
    sim->add_option("--output", mf.output_dir, "output directory, '-' for stdout")->required();
    sim->add_option("--config", mf.config_path, "INI config file");
    sim->add_option("--seed", seed_val, "base RNG seed, overrides the config");

    CLI11_PARSE(app, argc, argv);

    if (fit->parsed()) mf.command = commands::Command::Fit;
    if (rec->parsed()) {
        mf.command = commands::Command::Recommend;
        mf.budget = budget_val;
        mf.strategy = *strategy_from_name(strategy_str);
    }
    if (cmp->parsed()) mf.command = commands::Command::Compare;
    if (sim->parsed()) {
        mf.command = commands::Command::Simulate;
        if (sim->count("--seed") > 0) mf.seed = seed_val;
    }

    for (const std::string& tok : split_list(models_str)) {
        const auto kind = model_from_name(tok);
        if (!kind) {
            std::cerr << "error: unknown model '" << tok << "'\n";
            return 2;
        }
        mf.models.push_back(*kind);
    }

    try {
        return commands::run(mf, std::cerr);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
