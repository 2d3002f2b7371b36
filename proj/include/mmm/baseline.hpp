#pragma once

#include "mmm/model.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace mmm {

struct AdhocConfig {
    std::vector<double> alpha_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int ell = 5;

    void validate() const;
};

/// Ordinary least squares via column-pivoted QR. Throws LinearAlgebraError
/// naming the offending columns when the design is rank deficient.
struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
};

OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const std::vector<std::string>& column_names);

/// Pearson correlation; NaN when either series is constant.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct SignFlag {
    std::string name;
    double value = 0.0;
    bool violated = false;
};

/**
 * Output of the two-stage industry procedure. Coefficients are named
 * "beta_i" for adstocked media, "gamma_j" for nuisance columns and either
 * "intercept" (single region, added only when no nuisance column is
 * constant) or "region_<label>" dummies (several regions pooled; constant
 * nuisance columns are then dropped).
 */
struct AdhocResult {
    std::vector<double> alpha_grid;
    std::vector<double> alpha;        ///< chosen decay per media variable
    Eigen::MatrixXd correlations;     ///< m x grid, step-two Pearson correlations
    std::vector<std::string> coefficient_names;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd fitted;           ///< final-stage fitted values, regions stacked
    double residual_variance = 0.0;   ///< RSS / (rows - columns), NaN with no residual dof
    std::vector<SignFlag> sign_flags; ///< one per sign-constrained coefficient present in the fit
    bool pooled_regions = false;

    bool any_sign_violation() const;
};

/**
 * (1) regress y on the nuisance design; (2) for each media variable and
 * grid value, correlate the adstocked series with the step-one residuals
 * and keep the decay with the largest signed correlation (ties to the
 * smallest decay); (3) regress y on the chosen adstocked media plus the
 * nuisance design. Only weeks ell..w enter every regression.
 */
AdhocResult fit_adhoc(const PanelDataset& data, const ModelSpec& spec, const AdhocConfig& config);

}  // namespace mmm
