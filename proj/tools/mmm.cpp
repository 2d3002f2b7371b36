// Command-line front end: simulate panels, fit them, and print reports.

#include "mmm/errors.hpp"
#include "mmm/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

namespace fs = std::filesystem;

int exit_code_for(const std::string& code) {
    static const std::map<std::string, int> codes = {
        {"E_USAGE", 2},     {"E_INGEST", 3},  {"E_DIMENSION", 4}, {"E_DOMAIN", 4}, {"E_STRUCTURE", 4},
        {"E_OPTIMIZE", 5},  {"E_SAMPLER", 6}, {"E_LINALG", 7},    {"E_METRIC", 8},
    };
    const auto it = codes.find(code);
    return it == codes.end() ? 1 : it->second;
}

int report_error(const std::string& code, const std::string& message) {
    const mmm::Json err = {{"error", {{"code", code}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
    return exit_code_for(code);
}

struct FitFlags {
    std::string method;  // empty: keep the config file's method (default hmc)
    std::string data;
    std::string out;
    std::string config;
    std::string truth;
    std::optional<std::uint64_t> seed;
    std::optional<int> restarts;
    std::optional<int> iterations;
    std::optional<int> burn_in;
    std::optional<int> thin;
};

mmm::RunConfig build_run_config(const FitFlags& flags, std::optional<mmm::Method> forced) {
    mmm::RunConfig config;
    if (!flags.config.empty()) config = mmm::config_from_json(mmm::read_json(flags.config), config);
    if (forced) config.method = *forced;
    else if (!flags.method.empty()) config.method = mmm::parse_method(flags.method);
    config.data = flags.data;
    config.out = flags.out;
    if (!flags.truth.empty()) config.truth = fs::path(flags.truth);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.restarts) config.mle.restarts = *flags.restarts;
    if (flags.iterations) config.hmc.iterations = *flags.iterations;
    if (flags.burn_in) config.hmc.burn_in = *flags.burn_in;
    if (flags.thin) config.hmc.thinning = *flags.thin;
    return config;
}

void add_fit_options(CLI::App* cmd, FitFlags& flags, bool with_method) {
    if (with_method)
        cmd->add_option("--method", flags.method, "hmc, mle or adhoc")->check(CLI::IsMember({"hmc", "mle", "adhoc"}));
    cmd->add_option("--data", flags.data, "panel CSV")->required();
    cmd->add_option("--out", flags.out, "output directory")->required();
    cmd->add_option("--config", flags.config, "JSON run configuration");
    cmd->add_option("--truth", flags.truth, "truth.json for RMSE (default: next to the data file)");
    cmd->add_option("--seed", flags.seed, "random seed");
    cmd->add_option("--restarts", flags.restarts, "optimizer restarts (mle)")->check(CLI::PositiveNumber);
    cmd->add_option("--iterations", flags.iterations, "total sampler iterations (hmc)")->check(CLI::PositiveNumber);
    cmd->add_option("--burn-in", flags.burn_in, "discarded iterations (hmc)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--thin", flags.thin, "keep every n-th draw after burn-in (hmc)")->check(CLI::PositiveNumber);
}

int run_fit(const FitFlags& flags, std::optional<mmm::Method> forced) {
    const mmm::RunConfig config = build_run_config(flags, forced);
    const mmm::RunOutcome outcome = mmm::run(config);
    std::cout << mmm::render_report(outcome.report);
    std::cout << "wrote " << (config.out / "report.json").string() << '\n';
    std::fprintf(stderr, "runtime %.2f s\n", outcome.seconds);
    return 0;
}

int run_simulate(int case_id, std::optional<std::uint64_t> seed, const std::string& config_path,
                 const std::string& out) {
    std::uint64_t chosen_seed = 1;
    mmm::CovariateLaw law;
    if (!config_path.empty()) {
        const mmm::Json cfg = mmm::read_json(config_path);
        for (const auto& item : cfg.items())
            if (item.key() != "seed" && item.key() != "covariate_law")
                throw mmm::IngestionError("simulate config: unknown key '" + item.key() + "'");
        if (cfg.contains("seed")) chosen_seed = cfg.at("seed").get<std::uint64_t>();
        if (cfg.contains("covariate_law")) {
            const mmm::Json& l = cfg.at("covariate_law");
            law.x_low = l.value("x_low", law.x_low);
            law.x_high = l.value("x_high", law.x_high);
            law.z_low = l.value("z_low", law.z_low);
            law.z_high = l.value("z_high", law.z_high);
        }
    }
    if (seed) chosen_seed = *seed;
    mmm::ScenarioConfig scenario = mmm::ScenarioConfig::preset(case_id, chosen_seed);
    scenario.law = law;
    mmm::simulate_to_dir(scenario, out);
    std::cout << "case " << case_id << " seed " << chosen_seed << ": wrote " << (fs::path(out) / "panel.csv").string()
              << " and truth.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Marketing mix models with sign constraints: simulate, fit and report"};
    app.require_subcommand(1);

    int case_id = 1;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_out;
    std::string sim_config;
    auto* simulate = app.add_subcommand("simulate", "generate a preset simulation case");
    simulate->add_option("--case", case_id, "preset case 1-8")->check(CLI::Range(1, 8));
    simulate->add_option("--seed", sim_seed, "random seed");
    simulate->add_option("--config", sim_config, "JSON with seed and covariate_law");
    simulate->add_option("--out", sim_out, "output directory")->required();

    FitFlags fit_flags;
    auto* fit = app.add_subcommand("fit", "fit a panel with hmc, mle or adhoc");
    add_fit_options(fit, fit_flags, true);

    FitFlags base_flags;
    auto* baseline = app.add_subcommand("baseline", "two-stage grid search plus OLS (same as fit --method adhoc)");
    add_fit_options(baseline, base_flags, false);

    std::string report_out;
    std::string report_data;
    auto* report = app.add_subcommand("report", "print a saved report.json");
    report->add_option("--out", report_out, "directory holding report.json");
    report->add_option("--data", report_data, "path to a report.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("E_USAGE", e.what());
    }

    try {
        if (*simulate) return run_simulate(case_id, sim_seed, sim_config, sim_out);
        if (*fit) return run_fit(fit_flags, std::nullopt);
        if (*baseline) return run_fit(base_flags, mmm::Method::Adhoc);
        if (*report) {
            if (report_out.empty() == report_data.empty())
                return report_error("E_USAGE", "report: give exactly one of --out or --data");
            const fs::path path = report_data.empty() ? fs::path(report_out) / "report.json" : fs::path(report_data);
            std::cout << mmm::render_report(mmm::read_json(path));
            return 0;
        }
    } catch (const mmm::Error& e) {
        return report_error(e.code(), e.what());
    } catch (const mmm::Json::exception& e) {
        return report_error("E_INGEST", e.what());
    } catch (const std::exception& e) {
        return report_error("E_INTERNAL", e.what());
    }
    return report_error("E_USAGE", "no subcommand");
}
