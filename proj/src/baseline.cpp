#include "mmm/baseline.hpp"

#include "mmm/errors.hpp"
#include "mmm/transforms.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace mmm {

namespace {

bool is_constant_column(const PanelDataset& data, int j) {
    const double first = data.regions.front().z(0, j);
    for (const auto& region : data.regions)
        for (Eigen::Index t = 0; t < region.z.rows(); ++t)
            if (region.z(t, j) != first) return false;
    return true;
}

// Nuisance block of the design over the fitted weeks, pooled region by region.
struct NuisanceDesign {
    Eigen::MatrixXd matrix;
    std::vector<std::string> names;
};

NuisanceDesign nuisance_design(const PanelDataset& data, int ell) {
    const int g = data.region_count();
    const int n = data.nuisance_count();
    const int rows_per_region = data.weeks() - ell + 1;
    const bool pooled = g > 1;

    std::vector<int> kept;
    bool has_constant = false;
    for (int j = 0; j < n; ++j) {
        const bool constant = is_constant_column(data, j);
        has_constant = has_constant || constant;
        if (!(pooled && constant)) kept.push_back(j);
    }
    const bool add_intercept = !pooled && !has_constant;
    const int cols = static_cast<int>(kept.size()) + (pooled ? g : (add_intercept ? 1 : 0));

    NuisanceDesign out;
    out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_per_region) * g, cols);
    for (int v = 0; v < g; ++v) {
        const auto& region = data.regions[static_cast<std::size_t>(v)];
        const Eigen::Index row0 = static_cast<Eigen::Index>(v) * rows_per_region;
        for (std::size_t c = 0; c < kept.size(); ++c)
            out.matrix.block(row0, static_cast<Eigen::Index>(c), rows_per_region, 1) =
                region.z.block(ell - 1, kept[c], rows_per_region, 1);
        if (pooled) out.matrix.block(row0, static_cast<Eigen::Index>(kept.size()) + v, rows_per_region, 1).setOnes();
    }
    if (add_intercept) out.matrix.col(cols - 1).setOnes();

    for (int j : kept) out.names.push_back("gamma_" + std::to_string(j + 1));
    if (pooled) {
        for (const auto& region : data.regions) out.names.push_back("region_" + region.label);
    } else if (add_intercept) {
        out.names.push_back("intercept");
    }
    return out;
}

Eigen::VectorXd stacked_response(const PanelDataset& data, int ell) {
    const int rows_per_region = data.weeks() - ell + 1;
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows_per_region) * data.region_count());
    for (int v = 0; v < data.region_count(); ++v)
        y.segment(static_cast<Eigen::Index>(v) * rows_per_region, rows_per_region) =
            data.regions[static_cast<std::size_t>(v)].y.tail(rows_per_region);
    return y;
}

Eigen::VectorXd stacked_adstock(const PanelDataset& data, int i, double alpha, int ell) {
    const int rows_per_region = data.weeks() - ell + 1;
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows_per_region) * data.region_count());
    for (int v = 0; v < data.region_count(); ++v) {
        const auto& x = data.regions[static_cast<std::size_t>(v)].x;
        const std::span<const double> column(x.col(i).data(), static_cast<std::size_t>(x.rows()));
        const std::vector<double> c = adstock(column, AdstockParams{alpha, ell});
        out.segment(static_cast<Eigen::Index>(v) * rows_per_region, rows_per_region) =
            Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    }
    return out;
}

}  // namespace

void AdhocConfig::validate() const {
    if (alpha_grid.empty()) throw DomainError("AdhocConfig: alpha_grid is empty");
    for (double a : alpha_grid)
        if (!(a >= 0.0 && a < 1.0))
            throw DomainError("AdhocConfig: grid value " + std::to_string(a) + " outside [0, 1)");
    if (ell < 1) throw DomainError("AdhocConfig: ell must be >= 1");
}

bool AdhocResult::any_sign_violation() const {
    return std::any_of(sign_flags.begin(), sign_flags.end(), [](const SignFlag& f) { return f.violated; });
}

OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const std::vector<std::string>& column_names) {
    if (design.rows() != y.size())
        throw DimensionError("ols: design has " + std::to_string(design.rows()) + " rows but y has " +
                             std::to_string(y.size()));
    if (static_cast<Eigen::Index>(column_names.size()) != design.cols())
        throw DimensionError("ols: " + std::to_string(column_names.size()) + " names for " +
                             std::to_string(design.cols()) + " columns");
    if (design.cols() == 0) return {Eigen::VectorXd(0), y};

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.cols()) {
        const auto& perm = qr.colsPermutation().indices();
        std::string cols;
        for (Eigen::Index r = qr.rank(); r < design.cols(); ++r) {
            if (!cols.empty()) cols += ", ";
            cols += column_names[static_cast<std::size_t>(perm(r))];
        }
        throw LinearAlgebraError("ols: design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                                 " of " + std::to_string(design.cols()) + "); collinear columns: " + cols);
    }
    OlsFit fit;
    fit.coefficients = qr.solve(y);
    fit.residuals = y - design * fit.coefficients;
    return fit;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        throw DimensionError("pearson: series lengths differ (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    const Eigen::VectorXd da = a.array() - a.mean();
    const Eigen::VectorXd db = b.array() - b.mean();
    const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
    if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return da.dot(db) / denom;
}

AdhocResult fit_adhoc(const PanelDataset& data, const ModelSpec& spec, const AdhocConfig& config) {
    config.validate();
    data.validate();
    if (data.media_count() != spec.m || data.nuisance_count() != spec.n)
        throw DimensionError("fit_adhoc: data has m=" + std::to_string(data.media_count()) +
                             ", n=" + std::to_string(data.nuisance_count()) + " but the spec expects m=" +
                             std::to_string(spec.m) + ", n=" + std::to_string(spec.n));
    if (data.weeks() < config.ell)
        throw DimensionError("fit_adhoc: " + std::to_string(data.weeks()) + " weeks is fewer than ell=" +
                             std::to_string(config.ell));

    const int m = spec.m;
    const auto grid_size = static_cast<Eigen::Index>(config.alpha_grid.size());
    const NuisanceDesign nuisance = nuisance_design(data, config.ell);
    const Eigen::VectorXd y = stacked_response(data, config.ell);

    const OlsFit stage_one = ols(nuisance.matrix, y, nuisance.names);

    AdhocResult result;
    result.alpha_grid = config.alpha_grid;
    result.pooled_regions = data.region_count() > 1;
    result.correlations.resize(m, grid_size);
    result.alpha.resize(static_cast<std::size_t>(m));

    Eigen::MatrixXd media(y.size(), m);
    for (int i = 0; i < m; ++i) {
        Eigen::Index best = -1;
        for (Eigen::Index a = 0; a < grid_size; ++a) {
            const double alpha = config.alpha_grid[static_cast<std::size_t>(a)];
            const double r = pearson(stacked_adstock(data, i, alpha, config.ell), stage_one.residuals);
            result.correlations(i, a) = r;
            if (std::isnan(r)) continue;
            if (best < 0) {
                best = a;
                continue;
            }
            const double incumbent = result.correlations(i, best);
            const double incumbent_alpha = config.alpha_grid[static_cast<std::size_t>(best)];
            if (r > incumbent || (r == incumbent && alpha < incumbent_alpha)) best = a;
        }
        if (best < 0)
            best = std::min_element(config.alpha_grid.begin(), config.alpha_grid.end()) - config.alpha_grid.begin();
        result.alpha[static_cast<std::size_t>(i)] = config.alpha_grid[static_cast<std::size_t>(best)];
        media.col(i) = stacked_adstock(data, i, result.alpha[static_cast<std::size_t>(i)], config.ell);
    }

    Eigen::MatrixXd design(y.size(), m + nuisance.matrix.cols());
    design << media, nuisance.matrix;
    for (int i = 0; i < m; ++i) result.coefficient_names.push_back("beta_" + std::to_string(i + 1));
    result.coefficient_names.insert(result.coefficient_names.end(), nuisance.names.begin(), nuisance.names.end());

    const OlsFit final_fit = ols(design, y, result.coefficient_names);
    result.coefficients = final_fit.coefficients;
    result.fitted = y - final_fit.residuals;
    const Eigen::Index dof = design.rows() - design.cols();
    result.residual_variance = dof > 0 ? final_fit.residuals.squaredNorm() / static_cast<double>(dof)
                                       : std::numeric_limits<double>::quiet_NaN();

    for (std::size_t c = 0; c < result.coefficient_names.size(); ++c) {
        const std::string& name = result.coefficient_names[c];
        bool constrained = false;
        if (name.rfind("beta_", 0) == 0) constrained = spec.beta_constrained(std::stoi(name.substr(5)) - 1);
        else if (name.rfind("gamma_", 0) == 0) constrained = spec.gamma_constrained(std::stoi(name.substr(6)) - 1);
        if (!constrained) continue;
        const double value = result.coefficients(static_cast<Eigen::Index>(c));
        result.sign_flags.push_back({name, value, value < 0.0});
    }
    return result;
}

}  // namespace mmm
