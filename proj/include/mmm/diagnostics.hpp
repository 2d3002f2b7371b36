#pragma once

#include "mmm/hmc.hpp"
#include "mmm/model.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace mmm {

struct NamedValue {
    std::string name;
    double value = 0.0;
};

/// Pair a flat vector with its layout names.
std::vector<NamedValue> named(const Eigen::VectorXd& flat, const ModelSpec& spec);

/// sqrt(mean((estimate - truth)^2)) over every listed parameter, equally
/// weighted. Both lists must carry the same names in the same order.
double rmse(const std::vector<NamedValue>& estimates, const std::vector<NamedValue>& truth);

struct ParameterSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double lower = 0.0;  ///< empirical 2.5% quantile
    double upper = 0.0;  ///< empirical 97.5% quantile
    bool significant = false;  ///< lower > 0, i.e. H0: param = 0 rejected against param > 0
};

using PosteriorSummary = std::vector<ParameterSummary>;

/// Quantile by linear interpolation between order statistics at (N-1)p.
double empirical_quantile(std::vector<double> values, double p);

ParameterSummary summarize_draws(const std::string& name, const Eigen::VectorXd& draws);
PosteriorSummary summarize_chain(const SampleChain& chain);

struct RSquared {
    double marginal = 0.0;
    double conditional = 0.0;
};

/**
 * Marginal and conditional R^2 for a mixed model. `fixed_fitted` are the
 * fixed-effects fitted values over the whole panel; their spread is
 * sum((yhat - mean(yhat))^2) / N with N the number of fitted cells.
 * Throws MetricError when the total variance is zero.
 */
RSquared r_squared(const Eigen::MatrixXd& fixed_fitted, double sum_eta2, double sum_xi2, double sigma2);

/// Convenience wrapper taking point estimates on the original scale.
RSquared r_squared(const PanelDataset& data, const Parameters& estimate, const ModelSpec& spec);

struct Histogram {
    std::vector<double> edges;  ///< bins + 1 ascending edges
    std::vector<long> counts;
};

/// Equal-width bins over [min, max] of the values; the last bin is closed.
Histogram histogram(const Eigen::VectorXd& values, int bins = 30);

}  // namespace mmm
