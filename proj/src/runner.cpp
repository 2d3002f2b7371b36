#include "mmm/runner.hpp"

#include "mmm/diagnostics.hpp"
#include "mmm/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace mmm {

namespace {

namespace fs = std::filesystem;

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed, const std::string& context) {
    if (!obj.is_object()) throw IngestionError(context + ": expected a JSON object");
    for (const auto& item : obj.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw IngestionError(context + ": unknown key '" + item.key() + "'");
}

template <class T>
void assign(const Json& obj, const char* key, T& target, const std::string& context) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw IngestionError(context + "." + key + ": expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw IngestionError(context + "." + key + ": expected an integer");
    } else {
        if (!v.is_number()) throw IngestionError(context + "." + key + ": expected a number");
    }
    target = v.get<T>();
}

Json hmc_to_json(const HmcConfig& c) {
    return {{"iterations", c.iterations},         {"burn_in", c.burn_in},
            {"thinning", c.thinning},             {"leapfrog_steps", c.leapfrog_steps},
            {"step_size", c.step_size},           {"target_acceptance", c.target_acceptance},
            {"adapt", c.adapt},                   {"adapt_rate", c.adapt_rate},
            {"step_jitter", c.step_jitter},       {"init_noise_sd", c.init_noise_sd},
            {"max_reflections", c.max_reflections}, {"seed", c.seed}};
}

Json mle_to_json(const MleConfig& c) {
    Json fixed = Json::object();
    for (const auto& [name, value] : c.fixed) fixed[name] = value;
    return {{"restarts", c.restarts}, {"max_iterations", c.max_iterations}, {"gtol", c.gtol},
            {"epsilon", c.epsilon},   {"seed", c.seed},                     {"fixed", fixed}};
}

Json vector_json(const Eigen::VectorXd& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

// Parameter names are alphanumeric plus '_', so they are safe as file name parts.
void write_histograms(const fs::path& out, const std::vector<std::string>& names, const Eigen::MatrixXd& samples,
                      int bins) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c)
        write_text(out / ("histogram_" + names[static_cast<std::size_t>(c)] + ".csv"),
                   format_histogram(histogram(samples.col(c), bins)));
}

Json truth_rmse(const Eigen::VectorXd& estimate, const ModelSpec& spec, const std::optional<Json>& truth) {
    if (!truth) return nullptr;
    const ModelSpec truth_spec = spec_from_json(truth->at("model"), ModelSpec{});
    const Eigen::VectorXd truth_flat = flat_from_json(truth->at("parameters"), truth_spec);
    return rmse(named(estimate, spec), named(truth_flat, truth_spec));
}

Json r2_json(const RSquared& r2) { return {{"marginal", r2.marginal}, {"conditional", r2.conditional}}; }

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::Hmc: return "hmc";
        case Method::Mle: return "mle";
        case Method::Adhoc: return "adhoc";
    }
    return "unknown";
}

Method parse_method(const std::string& text) {
    if (text == "hmc") return Method::Hmc;
    if (text == "mle") return Method::Mle;
    if (text == "adhoc") return Method::Adhoc;
    throw IngestionError("method: expected hmc, mle or adhoc, got '" + text + "'");
}

RunConfig config_from_json(const Json& json, RunConfig base) {
    check_keys(json, {"method", "seed", "model", "hmc", "mle", "adhoc", "histogram_bins"}, "config");
    if (json.contains("method")) {
        if (!json.at("method").is_string()) throw IngestionError("config.method: expected a string");
        base.method = parse_method(json.at("method").get<std::string>());
    }
    assign(json, "seed", base.seed, "config");
    assign(json, "histogram_bins", base.histogram_bins, "config");
    if (json.contains("model")) {
        if (!json.at("model").is_object()) throw IngestionError("config.model: expected a JSON object");
        base.model_overrides = json.at("model");
    }
    if (json.contains("hmc")) {
        const Json& h = json.at("hmc");
        const std::string ctx = "config.hmc";
        check_keys(h, {"iterations", "burn_in", "thinning", "leapfrog_steps", "step_size", "target_acceptance",
                       "adapt", "adapt_rate", "step_jitter", "init_noise_sd", "max_reflections"},
                   ctx);
        HmcConfig& c = base.hmc;
        assign(h, "iterations", c.iterations, ctx);
        assign(h, "burn_in", c.burn_in, ctx);
        assign(h, "thinning", c.thinning, ctx);
        assign(h, "leapfrog_steps", c.leapfrog_steps, ctx);
        assign(h, "step_size", c.step_size, ctx);
        assign(h, "target_acceptance", c.target_acceptance, ctx);
        assign(h, "adapt", c.adapt, ctx);
        assign(h, "adapt_rate", c.adapt_rate, ctx);
        assign(h, "step_jitter", c.step_jitter, ctx);
        assign(h, "init_noise_sd", c.init_noise_sd, ctx);
        assign(h, "max_reflections", c.max_reflections, ctx);
    }
    if (json.contains("mle")) {
        const Json& mj = json.at("mle");
        const std::string ctx = "config.mle";
        check_keys(mj, {"restarts", "max_iterations", "gtol", "epsilon", "fixed"}, ctx);
        MleConfig& c = base.mle;
        assign(mj, "restarts", c.restarts, ctx);
        assign(mj, "max_iterations", c.max_iterations, ctx);
        assign(mj, "gtol", c.gtol, ctx);
        assign(mj, "epsilon", c.epsilon, ctx);
        if (mj.contains("fixed")) {
            const Json& f = mj.at("fixed");
            if (!f.is_object()) throw IngestionError(ctx + ".fixed: expected an object of name: value");
            for (const auto& item : f.items()) {
                if (!item.value().is_number()) throw IngestionError(ctx + ".fixed." + item.key() + ": expected a number");
                c.fixed[item.key()] = item.value().get<double>();
            }
        }
    }
    if (json.contains("adhoc")) {
        const Json& aj = json.at("adhoc");
        check_keys(aj, {"alpha_grid"}, "config.adhoc");
        if (aj.contains("alpha_grid")) {
            const Json& grid = aj.at("alpha_grid");
            if (!grid.is_array()) throw IngestionError("config.adhoc.alpha_grid: expected an array");
            base.adhoc.alpha_grid.clear();
            for (const auto& v : grid) {
                if (!v.is_number()) throw IngestionError("config.adhoc.alpha_grid: expected numbers");
                base.adhoc.alpha_grid.push_back(v.get<double>());
            }
        }
    }
    return base;
}

ModelSpec resolve_spec(const PanelDataset& data, const Json& model_overrides, const Json* truth) {
    ModelSpec spec;
    if (truth != nullptr && truth->contains("model")) {
        spec = spec_from_json(truth->at("model"), spec);
    } else {
        spec.m = data.media_count();
        spec.n = data.nuisance_count();
        spec.g = data.region_count();
        spec.hierarchical = spec.g > 1;
        spec.sign_constrained_beta.resize(static_cast<std::size_t>(spec.m));
        std::iota(spec.sign_constrained_beta.begin(), spec.sign_constrained_beta.end(), 0);
        spec.sign_constrained_gamma.resize(static_cast<std::size_t>(spec.n));
        std::iota(spec.sign_constrained_gamma.begin(), spec.sign_constrained_gamma.end(), 0);
    }
    spec = spec_from_json(model_overrides, spec);
    spec.validate();
    data.validate_against(spec);
    return spec;
}

RunOutcome run(const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const PanelDataset data = load_panel(config.data);

    std::optional<Json> truth;
    std::string truth_source;
    if (config.truth) {
        truth = read_json(*config.truth);
        truth_source = config.truth->filename().string();
    } else if (const fs::path sibling = config.data.parent_path() / "truth.json"; fs::exists(sibling)) {
        truth = read_json(sibling);
        truth_source = "truth.json";
    }
    const ModelSpec spec = resolve_spec(data, config.model_overrides, truth ? &*truth : nullptr);
    if (config.histogram_bins < 1) throw DomainError("histogram_bins must be >= 1");

    fs::create_directories(config.out);
    const std::vector<std::string> names = ParameterLayout(spec).names();

    Json report;
    report["schema_version"] = kReportSchemaVersion;
    report["method"] = to_string(config.method);
    report["seed"] = config.seed;
    report["data"] = {{"file", config.data.filename().string()},
                      {"regions", data.region_count()},
                      {"weeks", data.weeks()},
                      {"first_week", data.first_week}};
    report["model"] = spec_to_json(spec);
    report["truth_source"] = truth ? Json(truth_source) : Json(nullptr);

    switch (config.method) {
        case Method::Hmc: {
            HmcConfig hc = config.hmc;
            hc.seed = config.seed;
            const SampleChain chain = run_chain(data, spec, hc);
            const PosteriorSummary summary = summarize_chain(chain);
            Eigen::VectorXd mean(static_cast<Eigen::Index>(summary.size()));
            Json params = Json::array();
            for (std::size_t d = 0; d < summary.size(); ++d) {
                const ParameterSummary& s = summary[d];
                mean(static_cast<Eigen::Index>(d)) = s.mean;
                params.push_back({{"name", s.name},
                                  {"estimate", s.mean},
                                  {"sd", s.sd},
                                  {"lower", s.lower},
                                  {"upper", s.upper},
                                  {"significant", s.significant}});
            }
            long violations = 0;
            for (Eigen::Index r = 0; r < chain.draws.rows(); ++r)
                if (!is_feasible(unpack(chain.draws.row(r).transpose(), spec), spec)) ++violations;

            report["config"] = hmc_to_json(hc);
            report["parameters"] = params;
            report["rmse"] = truth_rmse(mean, spec, truth);
            report["r_squared"] = r2_json(r_squared(data, unpack(mean, spec), spec));
            report["hmc"] = {{"retained_draws", chain.draws.rows()},
                             {"acceptance_rate", chain.acceptance_rate},
                             {"burn_in_acceptance_rate", chain.burn_in_acceptance_rate},
                             {"step_size", chain.step_size},
                             {"constraint_violations", violations}};

            write_text(config.out / "draws.csv", format_draws(chain.names, chain.draws));
            std::string trace = "iteration,log_posterior\n";
            for (std::size_t it = 0; it < chain.log_posterior_trace.size(); ++it)
                trace += std::to_string(it + 1) + ',' + format_number(chain.log_posterior_trace[it]) + '\n';
            write_text(config.out / "trace.csv", trace);
            write_histograms(config.out, chain.names, chain.draws, config.histogram_bins);
            break;
        }
        case Method::Mle: {
            MleConfig mc = config.mle;
            mc.seed = config.seed;
            const MleResult fit = fit_mle(data, spec, mc);
            Json params = Json::array();
            for (std::size_t d = 0; d < names.size(); ++d)
                params.push_back({{"name", names[d]}, {"estimate", fit.estimate(static_cast<Eigen::Index>(d))}});
            Json restarts = Json::array();
            std::vector<Eigen::Index> usable;
            for (const RestartTrace& t : fit.restarts) {
                restarts.push_back({{"index", t.index},
                                    {"status", to_string(t.status)},
                                    {"iterations", t.iterations},
                                    {"log_likelihood", t.log_likelihood},
                                    {"projected_gradient_norm", t.projected_gradient_norm},
                                    {"start", flat_to_json(t.start, spec)},
                                    {"estimate", flat_to_json(t.estimate, spec)},
                                    {"trace", t.trace}});
                if (std::isfinite(t.log_likelihood)) usable.push_back(t.index);
            }
            report["config"] = mle_to_json(mc);
            report["parameters"] = params;
            report["rmse"] = truth_rmse(fit.estimate, spec, truth);
            report["r_squared"] = r2_json(r_squared(data, unpack(fit.estimate, spec), spec));
            report["mle"] = {{"log_likelihood", fit.log_likelihood},
                             {"best_restart", fit.best_restart},
                             {"restarts", restarts}};

            Eigen::MatrixXd optima(static_cast<Eigen::Index>(usable.size()), static_cast<Eigen::Index>(names.size()));
            for (std::size_t r = 0; r < usable.size(); ++r)
                optima.row(static_cast<Eigen::Index>(r)) =
                    fit.restarts[static_cast<std::size_t>(usable[r])].estimate.transpose();
            write_histograms(config.out, names, optima, config.histogram_bins);
            break;
        }
        case Method::Adhoc: {
            AdhocConfig ac = config.adhoc;
            ac.ell = spec.ell;
            const AdhocResult fit = fit_adhoc(data, spec, ac);
            Json params = Json::array();
            for (std::size_t i = 0; i < fit.alpha.size(); ++i)
                params.push_back({{"name", "alpha_" + std::to_string(i + 1)}, {"estimate", fit.alpha[i]}});
            for (std::size_t c = 0; c < fit.coefficient_names.size(); ++c)
                params.push_back({{"name", fit.coefficient_names[c]},
                                  {"estimate", fit.coefficients(static_cast<Eigen::Index>(c))}});
            params.push_back({{"name", "sigma2"}, {"estimate", fit.residual_variance}});
            Json correlations = Json::array();
            for (Eigen::Index i = 0; i < fit.correlations.rows(); ++i)
                correlations.push_back(vector_json(fit.correlations.row(i).transpose()));
            Json flags = Json::array();
            for (const SignFlag& f : fit.sign_flags)
                flags.push_back({{"name", f.name}, {"value", f.value}, {"violated", f.violated}});

            report["config"] = {{"alpha_grid", fit.alpha_grid}, {"ell", ac.ell}};
            report["parameters"] = params;
            report["rmse"] = nullptr;
            report["r_squared"] = r2_json(r_squared(fit.fitted, 0.0, 0.0, fit.residual_variance));
            report["adhoc"] = {{"alpha_grid", fit.alpha_grid},
                               {"correlations", correlations},
                               {"sign_flags", flags},
                               {"any_sign_violation", fit.any_sign_violation()},
                               {"pooled_regions", fit.pooled_regions}};
            break;
        }
    }

    write_text(config.out / "report.json", report.dump(2) + "\n");
    RunOutcome outcome;
    outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(config.out / "timing.json", Json{{"seconds", outcome.seconds}}.dump(2) + "\n");
    outcome.report = std::move(report);
    return outcome;
}

Json truth_to_json(const ScenarioConfig& config, const Scenario& scenario) {
    return {{"schema_version", kReportSchemaVersion},
            {"case", config.case_id},
            {"seed", config.seed},
            {"weeks", config.w},
            {"intercept", config.intercept},
            {"covariate_law",
             {{"x_low", config.law.x_low}, {"x_high", config.law.x_high}, {"z_low", config.law.z_low},
              {"z_high", config.law.z_high}}},
            {"model", spec_to_json(scenario.spec)},
            {"parameters", flat_to_json(pack(scenario.truth, scenario.spec), scenario.spec)}};
}

void simulate_to_dir(const ScenarioConfig& config, const fs::path& out) {
    const Scenario scenario = generate(config);
    fs::create_directories(out);
    save_panel(scenario.data, out / "panel.csv");
    write_text(out / "truth.json", truth_to_json(config, scenario).dump(2) + "\n");
}

std::string render_report(const Json& report) {
    std::ostringstream out;
    char line[256];
    out << "method: " << report.value("method", "?") << "  seed: " << report.value("seed", 0ULL) << '\n';
    if (report.contains("rmse") && report.at("rmse").is_number())
        out << "rmse vs truth: " << format_number(report.at("rmse").get<double>()) << '\n';
    if (report.contains("r_squared")) {
        const Json& r2 = report.at("r_squared");
        std::snprintf(line, sizeof line, "R^2 marginal %.4f  conditional %.4f\n", r2.value("marginal", 0.0),
                      r2.value("conditional", 0.0));
        out << line;
    }
    if (report.contains("hmc")) {
        const Json& h = report.at("hmc");
        std::snprintf(line, sizeof line, "acceptance %.3f  step %.4g  draws %ld  violations %ld\n",
                      h.value("acceptance_rate", 0.0), h.value("step_size", 0.0), h.value("retained_draws", 0L),
                      h.value("constraint_violations", 0L));
        out << line;
    }
    if (report.contains("mle")) {
        const Json& mj = report.at("mle");
        const Json& ll = mj.at("log_likelihood");
        out << "log-likelihood " << (ll.is_number() ? format_number(ll.get<double>()) : "n/a") << "  best restart "
            << mj.value("best_restart", -1) << " of " << mj.at("restarts").size() << '\n';
    }
    if (report.contains("adhoc"))
        out << "sign violations: " << (report.at("adhoc").value("any_sign_violation", false) ? "yes" : "no") << '\n';

    std::snprintf(line, sizeof line, "%-16s %12s %12s %12s %12s %4s\n", "parameter", "estimate", "sd", "2.5%",
                  "97.5%", "sig");
    out << line;
    for (const Json& p : report.at("parameters")) {
        auto num = [&](const char* key) -> std::string {
            if (!p.contains(key) || !p.at(key).is_number()) return "";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", p.at(key).get<double>());
            return buf;
        };
        const std::string sig = p.contains("significant") ? (p.at("significant").get<bool>() ? "*" : "") : "";
        std::snprintf(line, sizeof line, "%-16s %12s %12s %12s %12s %4s\n", p.at("name").get<std::string>().c_str(),
                      num("estimate").c_str(), num("sd").c_str(), num("lower").c_str(), num("upper").c_str(),
                      sig.c_str());
        out << line;
    }
    return out.str();
}

}  // namespace mmm
