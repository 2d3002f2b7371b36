#pragma once

#include "mmm/baseline.hpp"
#include "mmm/hmc.hpp"
#include "mmm/io.hpp"
#include "mmm/mle.hpp"
#include "mmm/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace mmm {

inline constexpr int kReportSchemaVersion = 1;

enum class Method { Hmc, Mle, Adhoc };

std::string to_string(Method method);
/// Accepts "hmc", "mle" and "adhoc"; throws IngestionError otherwise.
Method parse_method(const std::string& text);

/**
 * Everything a fit needs. The model spec is resolved at run time: start from
 * the `model` section of the truth file when one is available, otherwise
 * infer m, n and g from the panel (hierarchical when g > 1, every
 * coefficient sign-constrained, ell = 5), then apply `model_overrides`.
 * `seed` drives both the sampler and the optimizer restarts.
 */
struct RunConfig {
    Method method = Method::Hmc;
    Json model_overrides = Json::object();
    HmcConfig hmc;
    MleConfig mle;
    AdhocConfig adhoc;
    std::filesystem::path data;
    std::filesystem::path out;
    std::optional<std::filesystem::path> truth;
    std::uint64_t seed = 1;
    int histogram_bins = 30;
};

/// Overlay a JSON config document onto `base`. Unknown keys are rejected.
RunConfig config_from_json(const Json& json, RunConfig base = {});

/// Spec a fit of `data` will use (see RunConfig).
ModelSpec resolve_spec(const PanelDataset& data, const Json& model_overrides, const Json* truth);

struct RunOutcome {
    Json report;
    double seconds = 0.0;
};

/**
 * Fit, then write into `config.out`: report.json, timing.json, and per
 * method draws.csv + trace.csv (hmc) and histogram_<param>.csv (hmc over
 * draws, mle over restart optima). All files except timing.json are
 * byte-identical across runs with the same inputs and seed.
 */
RunOutcome run(const RunConfig& config);

/// Machine-readable description of a simulated scenario, including its truth.
Json truth_to_json(const ScenarioConfig& config, const Scenario& scenario);

/// Writes panel.csv and truth.json into `out`.
void simulate_to_dir(const ScenarioConfig& config, const std::filesystem::path& out);

/// Plain-text table of a report for the terminal.
std::string render_report(const Json& report);

}  // namespace mmm
