#pragma once

#include "mmm/priors.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace mmm {

/**
 * Declarative model description.
 *
 * Media variables x_1..x_m go through adstock and Weibull saturation;
 * nuisance variables z_1..z_n enter linearly (an intercept is a nuisance
 * column of ones). Index sets are 0-based. In a hierarchical model every
 * coefficient has one random coefficient per region drawn around its fixed
 * mean; the transform parameters are always shared across regions.
 */
struct ModelSpec {
    int m = 1;
    int n = 0;
    int g = 1;
    int ell = 5;
    std::vector<int> sign_constrained_beta;
    std::vector<int> sign_constrained_gamma;
    bool hierarchical = false;
    PriorConfig priors;
    /// Sampler carries the Weibull shape and scale as logs (with the
    /// log-Jacobian). When false they are reflected off zero like the
    /// variances.
    bool log_scale_transforms = true;

    void validate() const;
    bool beta_constrained(int i) const;
    bool gamma_constrained(int j) const;
    /// Number of fitted weeks per region for a panel of `w` weeks.
    int fitted_weeks(int w) const { return w - ell + 1; }
};

/// One region's block of the panel; all matrices have `w` rows.
struct RegionPanel {
    std::string label;
    Eigen::VectorXd y;
    Eigen::MatrixXd x;  ///< w x m, nonnegative
    Eigen::MatrixXd z;  ///< w x n
};

/// Rectangular region x week panel.
struct PanelDataset {
    std::vector<RegionPanel> regions;
    int first_week = 1;

    int weeks() const { return regions.empty() ? 0 : static_cast<int>(regions.front().y.size()); }
    int region_count() const { return static_cast<int>(regions.size()); }
    int media_count() const { return regions.empty() ? 0 : static_cast<int>(regions.front().x.cols()); }
    int nuisance_count() const {
        return regions.empty() ? 0 : static_cast<int>(regions.front().z.cols());
    }

    /// Shape checks and x >= 0. Throws DimensionError / DomainError.
    void validate() const;
    /// validate() plus agreement with the spec's m, n, g and ell.
    void validate_against(const ModelSpec& spec) const;
};

/// Structured view of every unknown.
struct Parameters {
    Eigen::VectorXd alpha;
    Eigen::VectorXd k;
    Eigen::VectorXd lambda;
    Eigen::VectorXd beta;
    Eigen::VectorXd gamma;
    Eigen::VectorXd eta2;     ///< hierarchical only
    Eigen::VectorXd xi2;      ///< hierarchical only
    Eigen::MatrixXd beta_r;   ///< m x g, hierarchical only
    Eigen::MatrixXd gamma_r;  ///< n x g, hierarchical only
    double sigma2 = 1.0;

    /// Correctly sized, every entry zero except sigma2 = 1.
    static Parameters zeros(const ModelSpec& spec);
};

enum class ParamKind { Alpha, Shape, Scale, Beta, Gamma, Eta2, Xi2, BetaRandom, GammaRandom, Sigma2 };

enum class Reparam { Identity, Logit, Log };

struct ParamInfo {
    std::string name;
    ParamKind kind;
    int index = 0;    ///< variable index i or j (0-based)
    int region = -1;  ///< region for random coefficients, else -1
    double lower = 0.0;
    double upper = 0.0;
    Reparam reparam = Reparam::Identity;
};

/**
 * Flat packing order, fixed for a given spec:
 *
 *     alpha[m] k[m] lambda[m] beta[m] gamma[n]
 *     eta2[m] xi2[n] beta_r[m*g] gamma_r[n*g]    (hierarchical only)
 *     sigma2
 *
 * Random coefficients are region-major: beta_r entry (i, v) sits at
 * beta_r_offset() + v*m + i. Names are 1-based, e.g. "beta_2",
 * "beta_r_2_1" (variable 2, region 1), "sigma2".
 */
class ParameterLayout {
public:
    explicit ParameterLayout(const ModelSpec& spec);

    std::size_t size() const { return entries_.size(); }
    const std::vector<ParamInfo>& entries() const { return entries_; }
    const ParamInfo& operator[](std::size_t idx) const { return entries_[idx]; }
    std::vector<std::string> names() const;

    int alpha(int i) const { return alpha_ + i; }
    int k(int i) const { return k_ + i; }
    int lambda(int i) const { return lambda_ + i; }
    int beta(int i) const { return beta_ + i; }
    int gamma(int j) const { return gamma_ + j; }
    int eta2(int i) const { return eta2_ + i; }
    int xi2(int j) const { return xi2_ + j; }
    int beta_r(int i, int v) const { return beta_r_ + v * m_ + i; }
    int gamma_r(int j, int v) const { return gamma_r_ + v * n_ + j; }
    int sigma2() const { return sigma2_; }

private:
    int m_;
    int n_;
    int alpha_ = 0, k_ = 0, lambda_ = 0, beta_ = 0, gamma_ = 0;
    int eta2_ = 0, xi2_ = 0, beta_r_ = 0, gamma_r_ = 0, sigma2_ = 0;
    std::vector<ParamInfo> entries_;
};

Eigen::VectorXd pack(const Parameters& theta, const ModelSpec& spec);
Parameters unpack(const Eigen::VectorXd& flat, const ModelSpec& spec);

/// True when theta has the right shapes and satisfies every hard constraint.
bool is_feasible(const Parameters& theta, const ModelSpec& spec);
/// Throws StructuralError on shape mismatch and DomainError naming the first
/// violated constraint.
void check_feasible(const Parameters& theta, const ModelSpec& spec);

enum class Effects {
    Conditional,  ///< region-specific random coefficients (hierarchical)
    Fixed         ///< fixed means only
};

/**
 * Noise-free fitted values. Result is (w - ell + 1) x g; row q is week
 * first_week + ell - 1 + q. In a base model (or with Effects::Fixed) every
 * region uses the fixed means.
 */
Eigen::MatrixXd predict(const Parameters& theta, const PanelDataset& data, const ModelSpec& spec,
                        Effects effects = Effects::Conditional);

}  // namespace mmm
