#include "mmm/model.hpp"

#include "mmm/errors.hpp"
#include "mmm/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace mmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string idx1(int i) { return std::to_string(i + 1); }

void check_index_set(const std::vector<int>& set, int bound, const char* what) {
    std::vector<int> sorted = set;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw StructuralError(std::string(what) + ": duplicate index");
    }
    for (int i : set) {
        if (i < 0 || i >= bound) {
            throw StructuralError(std::string(what) + ": index " + std::to_string(i) +
                                  " out of range [0, " + std::to_string(bound) + ")");
        }
    }
}

void check_size(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) {
        throw StructuralError(std::string(what) + ": expected " + std::to_string(want) +
                              " entries, got " + std::to_string(got));
    }
}

}  // namespace

void PriorConfig::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(std::string("prior: ") + what + " must be finite and > 0");
        }
    };
    positive(alpha_logit.sd, "alpha_logit.sd");
    positive(shape.shape, "shape.shape");
    positive(shape.rate, "shape.rate");
    positive(scale.shape, "scale.shape");
    positive(scale.rate, "scale.rate");
    positive(constrained_coef.sd, "constrained_coef.sd");
    positive(unconstrained_coef.sd, "unconstrained_coef.sd");
    positive(random_variance_tn.sd, "random_variance_tn.sd");
    positive(random_variance_ig.shape, "random_variance_ig.shape");
    positive(random_variance_ig.scale, "random_variance_ig.scale");
    positive(residual_variance.shape, "residual_variance.shape");
    positive(residual_variance.scale, "residual_variance.scale");
}

void ModelSpec::validate() const {
    if (m < 1) throw StructuralError("model: m must be >= 1");
    if (n < 0) throw StructuralError("model: n must be >= 0");
    if (g < 1) throw StructuralError("model: g must be >= 1");
    if (ell < 1) throw StructuralError("model: ell must be >= 1");
    if (hierarchical && g < 2) throw StructuralError("model: a hierarchical model needs g >= 2");
    check_index_set(sign_constrained_beta, m, "model: sign_constrained_beta");
    check_index_set(sign_constrained_gamma, n, "model: sign_constrained_gamma");
    priors.validate();
}

bool ModelSpec::beta_constrained(int i) const {
    return std::find(sign_constrained_beta.begin(), sign_constrained_beta.end(), i) !=
           sign_constrained_beta.end();
}

bool ModelSpec::gamma_constrained(int j) const {
    return std::find(sign_constrained_gamma.begin(), sign_constrained_gamma.end(), j) !=
           sign_constrained_gamma.end();
}

void PanelDataset::validate() const {
    if (regions.empty()) throw DimensionError("panel: no regions");
    const auto w = regions.front().y.size();
    const auto m = regions.front().x.cols();
    const auto n = regions.front().z.cols();
    for (const auto& r : regions) {
        if (r.y.size() != w || r.x.rows() != w || r.z.rows() != w) {
            throw DimensionError("panel: region '" + r.label + "' has a different number of weeks");
        }
        if (r.x.cols() != m || r.z.cols() != n) {
            throw DimensionError("panel: region '" + r.label + "' has a different number of columns");
        }
        for (Eigen::Index t = 0; t < w; ++t) {
            if (!std::isfinite(r.y(t))) {
                throw DomainError("panel: non-finite y in region '" + r.label + "'");
            }
            for (Eigen::Index i = 0; i < m; ++i) {
                if (!std::isfinite(r.x(t, i)) || r.x(t, i) < 0.0) {
                    throw DomainError("panel: media value x" + std::to_string(i + 1) +
                                      " must be finite and >= 0 in region '" + r.label + "'");
                }
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                if (!std::isfinite(r.z(t, j))) {
                    throw DomainError("panel: non-finite z in region '" + r.label + "'");
                }
            }
        }
    }
}

void PanelDataset::validate_against(const ModelSpec& spec) const {
    validate();
    if (media_count() != spec.m || nuisance_count() != spec.n || region_count() != spec.g) {
        throw DimensionError("panel: data has m=" + std::to_string(media_count()) +
                             " n=" + std::to_string(nuisance_count()) +
                             " g=" + std::to_string(region_count()) + " but the model expects m=" +
                             std::to_string(spec.m) + " n=" + std::to_string(spec.n) +
                             " g=" + std::to_string(spec.g));
    }
    if (weeks() < spec.ell) {
        throw DimensionError("panel: " + std::to_string(weeks()) +
                             " weeks is shorter than the carryover window " + std::to_string(spec.ell));
    }
}

Parameters Parameters::zeros(const ModelSpec& spec) {
    Parameters p;
    p.alpha = Eigen::VectorXd::Zero(spec.m);
    p.k = Eigen::VectorXd::Zero(spec.m);
    p.lambda = Eigen::VectorXd::Zero(spec.m);
    p.beta = Eigen::VectorXd::Zero(spec.m);
    p.gamma = Eigen::VectorXd::Zero(spec.n);
    if (spec.hierarchical) {
        p.eta2 = Eigen::VectorXd::Zero(spec.m);
        p.xi2 = Eigen::VectorXd::Zero(spec.n);
        p.beta_r = Eigen::MatrixXd::Zero(spec.m, spec.g);
        p.gamma_r = Eigen::MatrixXd::Zero(spec.n, spec.g);
    }
    p.sigma2 = 1.0;
    return p;
}

ParameterLayout::ParameterLayout(const ModelSpec& spec) : m_(spec.m), n_(spec.n) {
    const Reparam transform = spec.log_scale_transforms ? Reparam::Log : Reparam::Identity;
    auto add = [this](std::string name, ParamKind kind, int index, int region, double lower,
                      double upper, Reparam reparam) {
        entries_.push_back({std::move(name), kind, index, region, lower, upper, reparam});
    };
    alpha_ = static_cast<int>(entries_.size());
    for (int i = 0; i < m_; ++i) add("alpha_" + idx1(i), ParamKind::Alpha, i, -1, 0.0, 1.0, Reparam::Logit);
    k_ = static_cast<int>(entries_.size());
    for (int i = 0; i < m_; ++i) add("k_" + idx1(i), ParamKind::Shape, i, -1, 0.0, kInf, transform);
    lambda_ = static_cast<int>(entries_.size());
    for (int i = 0; i < m_; ++i)
        add("lambda_" + idx1(i), ParamKind::Scale, i, -1, 0.0, kInf, transform);
    beta_ = static_cast<int>(entries_.size());
    for (int i = 0; i < m_; ++i)
        add("beta_" + idx1(i), ParamKind::Beta, i, -1, spec.beta_constrained(i) ? 0.0 : -kInf, kInf,
            Reparam::Identity);
    gamma_ = static_cast<int>(entries_.size());
    for (int j = 0; j < n_; ++j)
        add("gamma_" + idx1(j), ParamKind::Gamma, j, -1, spec.gamma_constrained(j) ? 0.0 : -kInf, kInf,
            Reparam::Identity);
    eta2_ = xi2_ = beta_r_ = gamma_r_ = static_cast<int>(entries_.size());
    if (spec.hierarchical) {
        for (int i = 0; i < m_; ++i)
            add("eta2_" + idx1(i), ParamKind::Eta2, i, -1, 0.0, kInf, Reparam::Identity);
        xi2_ = static_cast<int>(entries_.size());
        for (int j = 0; j < n_; ++j)
            add("xi2_" + idx1(j), ParamKind::Xi2, j, -1, 0.0, kInf, Reparam::Identity);
        beta_r_ = static_cast<int>(entries_.size());
        for (int v = 0; v < spec.g; ++v)
            for (int i = 0; i < m_; ++i)
                add("beta_r_" + idx1(i) + "_" + idx1(v), ParamKind::BetaRandom, i, v,
                    spec.beta_constrained(i) ? 0.0 : -kInf, kInf, Reparam::Identity);
        gamma_r_ = static_cast<int>(entries_.size());
        for (int v = 0; v < spec.g; ++v)
            for (int j = 0; j < n_; ++j)
                add("gamma_r_" + idx1(j) + "_" + idx1(v), ParamKind::GammaRandom, j, v,
                    spec.gamma_constrained(j) ? 0.0 : -kInf, kInf, Reparam::Identity);
    }
    sigma2_ = static_cast<int>(entries_.size());
    add("sigma2", ParamKind::Sigma2, 0, -1, 0.0, kInf, Reparam::Identity);
}

std::vector<std::string> ParameterLayout::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
}

Eigen::VectorXd pack(const Parameters& theta, const ModelSpec& spec) {
    const ParameterLayout layout(spec);
    check_size(theta.alpha.size(), spec.m, "pack: alpha");
    check_size(theta.k.size(), spec.m, "pack: k");
    check_size(theta.lambda.size(), spec.m, "pack: lambda");
    check_size(theta.beta.size(), spec.m, "pack: beta");
    check_size(theta.gamma.size(), spec.n, "pack: gamma");
    Eigen::VectorXd flat(layout.size());
    for (int i = 0; i < spec.m; ++i) {
        flat(layout.alpha(i)) = theta.alpha(i);
        flat(layout.k(i)) = theta.k(i);
        flat(layout.lambda(i)) = theta.lambda(i);
        flat(layout.beta(i)) = theta.beta(i);
    }
    for (int j = 0; j < spec.n; ++j) flat(layout.gamma(j)) = theta.gamma(j);
    if (spec.hierarchical) {
        check_size(theta.eta2.size(), spec.m, "pack: eta2");
        check_size(theta.xi2.size(), spec.n, "pack: xi2");
        check_size(theta.beta_r.size(), static_cast<Eigen::Index>(spec.m) * spec.g, "pack: beta_r");
        check_size(theta.gamma_r.size(), static_cast<Eigen::Index>(spec.n) * spec.g, "pack: gamma_r");
        if (theta.beta_r.rows() != spec.m || theta.gamma_r.rows() != spec.n) {
            throw StructuralError("pack: random coefficient matrices must be variables x regions");
        }
        for (int i = 0; i < spec.m; ++i) flat(layout.eta2(i)) = theta.eta2(i);
        for (int j = 0; j < spec.n; ++j) flat(layout.xi2(j)) = theta.xi2(j);
        for (int v = 0; v < spec.g; ++v) {
            for (int i = 0; i < spec.m; ++i) flat(layout.beta_r(i, v)) = theta.beta_r(i, v);
            for (int j = 0; j < spec.n; ++j) flat(layout.gamma_r(j, v)) = theta.gamma_r(j, v);
        }
    }
    flat(layout.sigma2()) = theta.sigma2;
    return flat;
}

Parameters unpack(const Eigen::VectorXd& flat, const ModelSpec& spec) {
    const ParameterLayout layout(spec);
    check_size(flat.size(), static_cast<Eigen::Index>(layout.size()), "unpack");
    Parameters p = Parameters::zeros(spec);
    for (int i = 0; i < spec.m; ++i) {
        p.alpha(i) = flat(layout.alpha(i));
        p.k(i) = flat(layout.k(i));
        p.lambda(i) = flat(layout.lambda(i));
        p.beta(i) = flat(layout.beta(i));
    }
    for (int j = 0; j < spec.n; ++j) p.gamma(j) = flat(layout.gamma(j));
    if (spec.hierarchical) {
        for (int i = 0; i < spec.m; ++i) p.eta2(i) = flat(layout.eta2(i));
        for (int j = 0; j < spec.n; ++j) p.xi2(j) = flat(layout.xi2(j));
        for (int v = 0; v < spec.g; ++v) {
            for (int i = 0; i < spec.m; ++i) p.beta_r(i, v) = flat(layout.beta_r(i, v));
            for (int j = 0; j < spec.n; ++j) p.gamma_r(j, v) = flat(layout.gamma_r(j, v));
        }
    }
    p.sigma2 = flat(layout.sigma2());
    return p;
}

void check_feasible(const Parameters& theta, const ModelSpec& spec) {
    // pack() does the shape checks
    const Eigen::VectorXd flat = pack(theta, spec);
    const ParameterLayout layout(spec);
    for (std::size_t idx = 0; idx < layout.size(); ++idx) {
        const ParamInfo& info = layout[idx];
        const double v = flat(static_cast<Eigen::Index>(idx));
        bool ok = std::isfinite(v);
        switch (info.kind) {
            case ParamKind::Alpha:
                ok = ok && v >= 0.0 && v < 1.0;
                break;
            case ParamKind::Shape:
            case ParamKind::Scale:
            case ParamKind::Eta2:
            case ParamKind::Xi2:
            case ParamKind::Sigma2:
                ok = ok && v > 0.0;
                break;
            default:
                ok = ok && v >= info.lower;
                break;
        }
        if (!ok) {
            throw DomainError("parameter " + info.name + " = " + std::to_string(v) +
                              " violates its constraint");
        }
    }
}

bool is_feasible(const Parameters& theta, const ModelSpec& spec) {
    try {
        check_feasible(theta, spec);
        return true;
    } catch (const Error&) {
        return false;
    }
}

Eigen::MatrixXd predict(const Parameters& theta, const PanelDataset& data, const ModelSpec& spec,
                        Effects effects) {
    check_feasible(theta, spec);
    data.validate_against(spec);
    const int w = data.weeks();
    const int rows = spec.fitted_weeks(w);
    const bool conditional = spec.hierarchical && effects == Effects::Conditional;
    Eigen::MatrixXd fitted = Eigen::MatrixXd::Zero(rows, spec.g);
    for (int v = 0; v < spec.g; ++v) {
        const RegionPanel& region = data.regions[static_cast<std::size_t>(v)];
        for (int i = 0; i < spec.m; ++i) {
            const double b = conditional ? theta.beta_r(i, v) : theta.beta(i);
            const Eigen::VectorXd col = region.x.col(i);
            const auto contribution =
                response(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), b,
                         AdstockParams{theta.alpha(i), spec.ell},
                         SaturationParams{theta.k(i), theta.lambda(i)});
            for (int q = 0; q < rows; ++q) fitted(q, v) += contribution[static_cast<std::size_t>(q)];
        }
        for (int j = 0; j < spec.n; ++j) {
            const double c = conditional ? theta.gamma_r(j, v) : theta.gamma(j);
            fitted.col(v) += c * region.z.col(j).tail(rows);
        }
    }
    return fitted;
}

}  // namespace mmm
