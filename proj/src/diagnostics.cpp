#include "mmm/diagnostics.hpp"

#include "mmm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mmm {

std::vector<NamedValue> named(const Eigen::VectorXd& flat, const ModelSpec& spec) {
    const ParameterLayout layout(spec);
    if (static_cast<std::size_t>(flat.size()) != layout.size()) {
        throw StructuralError("named: vector length does not match the parameter layout");
    }
    std::vector<NamedValue> out;
    out.reserve(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
        out.push_back({layout[i].name, flat(static_cast<Eigen::Index>(i))});
    }
    return out;
}

double rmse(const std::vector<NamedValue>& estimates, const std::vector<NamedValue>& truth) {
    if (estimates.size() != truth.size()) {
        throw StructuralError("rmse: " + std::to_string(estimates.size()) + " estimates vs " +
                              std::to_string(truth.size()) + " true values");
    }
    if (estimates.empty()) throw StructuralError("rmse: no parameters");
    double ss = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (estimates[i].name != truth[i].name) {
            throw StructuralError("rmse: parameter '" + estimates[i].name + "' is aligned with '" +
                                  truth[i].name + "'");
        }
        const double d = estimates[i].value - truth[i].value;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(estimates.size()));
}

double empirical_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw MetricError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ParameterSummary summarize_draws(const std::string& name, const Eigen::VectorXd& draws) {
    if (draws.size() == 0) throw MetricError("summarize: parameter '" + name + "' has no draws");
    ParameterSummary s;
    s.name = name;
    s.mean = draws.mean();
    if (draws.size() > 1) {
        s.sd = std::sqrt((draws.array() - s.mean).square().sum() / static_cast<double>(draws.size() - 1));
    }
    const std::vector<double> v(draws.data(), draws.data() + draws.size());
    s.lower = empirical_quantile(v, 0.025);
    s.upper = empirical_quantile(v, 0.975);
    s.significant = s.lower > 0.0;
    return s;
}

PosteriorSummary summarize_chain(const SampleChain& chain) {
    if (chain.draws.rows() == 0) throw MetricError("summarize: chain has no retained draws");
    PosteriorSummary out;
    for (Eigen::Index c = 0; c < chain.draws.cols(); ++c) {
        out.push_back(summarize_draws(chain.names[static_cast<std::size_t>(c)], chain.draws.col(c)));
    }
    return out;
}

RSquared r_squared(const Eigen::MatrixXd& fixed_fitted, double sum_eta2, double sum_xi2, double sigma2) {
    if (fixed_fitted.size() == 0) throw MetricError("r_squared: no fitted values");
    const double mean = fixed_fitted.mean();
    const double fixed_var =
        (fixed_fitted.array() - mean).square().sum() / static_cast<double>(fixed_fitted.size());
    const double random_var = sum_eta2 + sum_xi2;
    const double total = fixed_var + random_var + sigma2;
    if (!(total > 0.0)) throw MetricError("r_squared: total variance is zero");
    return {fixed_var / total, (fixed_var + random_var) / total};
}

RSquared r_squared(const PanelDataset& data, const Parameters& estimate, const ModelSpec& spec) {
    const Eigen::MatrixXd fitted = predict(estimate, data, spec, Effects::Fixed);
    const double eta = spec.hierarchical ? estimate.eta2.sum() : 0.0;
    const double xi = spec.hierarchical ? estimate.xi2.sum() : 0.0;
    return r_squared(fitted, eta, xi, estimate.sigma2);
}

Histogram histogram(const Eigen::VectorXd& values, int bins) {
    if (bins < 1) throw DomainError("histogram: bins must be >= 1");
    if (values.size() == 0) throw MetricError("histogram: no values");
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = lo + width * b;
    h.edges.back() = hi;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        int b = width > 0.0 ? static_cast<int>((values(i) - lo) / width) : 0;
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

}  // namespace mmm
