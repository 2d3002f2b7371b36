#include "mmm/errors.hpp"
#include "mmm/runner.hpp"

#include <doctest.h>

#include <filesystem>

using namespace mmm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mmm_runner_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig short_hmc(const fs::path& data, const fs::path& out) {
    RunConfig cfg;
    cfg.data = data;
    cfg.out = out;
    cfg.hmc.iterations = 600;
    cfg.hmc.burn_in = 300;
    cfg.hmc.thinning = 3;
    return cfg;
}

}  // namespace

TEST_CASE("config documents overlay defaults and reject unknown keys") {
    const Json doc = Json::parse(R"({
        "method": "mle", "seed": 42,
        "mle": {"restarts": 5, "fixed": {"alpha_1": 0.5}},
        "hmc": {"iterations": 100, "burn_in": 50, "thinning": 5},
        "adhoc": {"alpha_grid": [0.2, 0.4]},
        "model": {"ell": 4}
    })");
    const RunConfig cfg = config_from_json(doc);
    CHECK(cfg.method == Method::Mle);
    CHECK(cfg.seed == 42);
    CHECK(cfg.mle.restarts == 5);
    CHECK(cfg.mle.fixed.at("alpha_1") == 0.5);
    CHECK(cfg.mle.max_iterations == 1000);
    CHECK(cfg.hmc.thinning == 5);
    CHECK(cfg.adhoc.alpha_grid == std::vector<double>{0.2, 0.4});
    CHECK(cfg.model_overrides.at("ell") == 4);

    CHECK_THROWS_AS(config_from_json(Json{{"metod", "hmc"}}), IngestionError);
    CHECK_THROWS_AS(config_from_json(Json{{"hmc", {{"iters", 5}}}}), IngestionError);
    CHECK_THROWS_AS(config_from_json(Json{{"method", "nuts"}}), IngestionError);
    CHECK_THROWS_AS(config_from_json(Json{{"seed", "one"}}), IngestionError);
    CHECK(parse_method("adhoc") == Method::Adhoc);
    CHECK(to_string(Method::Hmc) == "hmc");
}

TEST_CASE("spec resolution: inferred, from truth, then overrides") {
    const ScenarioConfig sc_cfg = ScenarioConfig::preset(5, 1);
    const Scenario sc = generate(sc_cfg);

    const ModelSpec inferred = resolve_spec(sc.data, Json::object(), nullptr);
    CHECK(inferred.m == 2);
    CHECK(inferred.n == 2);
    CHECK(inferred.g == 2);
    CHECK(inferred.hierarchical);
    CHECK(inferred.ell == 5);
    CHECK(inferred.sign_constrained_gamma == std::vector<int>{0, 1});

    Json truth = truth_to_json(sc_cfg, sc);
    truth["model"]["ell"] = 3;
    CHECK(resolve_spec(sc.data, Json::object(), &truth).ell == 3);
    CHECK(resolve_spec(sc.data, Json{{"ell", 4}}, &truth).ell == 4);
    CHECK(resolve_spec(sc.data, Json{{"hierarchical", false}}, nullptr).hierarchical == false);
    CHECK_THROWS_AS(resolve_spec(sc.data, Json{{"m", 3}}, nullptr), DimensionError);
}

TEST_CASE("hmc run writes deterministic artifacts") {
    const fs::path dir = scratch("hmc");
    simulate_to_dir(ScenarioConfig::preset(1, 7), dir / "data");
    RunConfig cfg = short_hmc(dir / "data" / "panel.csv", dir / "a");
    const RunOutcome a = run(cfg);
    cfg.out = dir / "b";
    run(cfg);
    for (const char* f : {"report.json", "draws.csv", "trace.csv", "histogram_beta_1.csv"})
        CHECK(read_text(dir / "a" / f) == read_text(dir / "b" / f));
    CHECK(fs::exists(dir / "a" / "timing.json"));
    CHECK(a.report.at("schema_version") == kReportSchemaVersion);
    CHECK(a.report.at("truth_source") == "truth.json");
    CHECK(a.report.at("rmse").is_number());
    CHECK(a.report.at("hmc").at("retained_draws") == 100);
    CHECK(a.report.at("hmc").at("constraint_violations") == 0);
    CHECK(a.report.at("parameters").size() == 11);
    CHECK_FALSE(a.report.contains("seconds"));

    cfg.out = dir / "c";
    cfg.seed = 2;
    run(cfg);
    CHECK(read_text(dir / "a" / "draws.csv") != read_text(dir / "c" / "draws.csv"));
}

TEST_CASE("mle and adhoc runs") {
    const fs::path dir = scratch("mle");
    simulate_to_dir(ScenarioConfig::preset(5, 7), dir / "data");
    RunConfig cfg;
    cfg.data = dir / "data" / "panel.csv";
    cfg.out = dir / "mle";
    cfg.method = Method::Mle;
    cfg.mle.restarts = 3;
    const Json mle = run(cfg).report;
    CHECK(mle.at("mle").at("restarts").size() == 3);
    CHECK(mle.at("parameters").size() == 23);
    CHECK(fs::exists(dir / "mle" / "histogram_sigma2.csv"));
    CHECK_FALSE(fs::exists(dir / "mle" / "draws.csv"));
    CHECK(mle.at("r_squared").at("conditional").get<double>() >= mle.at("r_squared").at("marginal").get<double>());

    cfg.method = Method::Adhoc;
    cfg.out = dir / "adhoc";
    const Json adhoc = run(cfg).report;
    CHECK(adhoc.at("rmse").is_null());
    CHECK(adhoc.at("adhoc").at("pooled_regions") == true);
    CHECK(adhoc.at("adhoc").at("sign_flags").size() == 3);
    CHECK(render_report(adhoc).find("sign violations") != std::string::npos);
}
