#include "ivboot/bootstrap.hpp"

#include <cmath>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "ivboot/errors.hpp"
#include "ivboot/linalg.hpp"
#include "ivboot/stats.hpp"

namespace ivboot {

namespace {

void check_weights(const GeneralDesign& design, const Vec& weights) {
    design.validate();
    if (weights.size() != design.n_obs()) throw DimensionError("weights must have one entry per observation");
}

double penalty_scale(const GeneralDesign& design, const Vec& weights, PenaltyWeighting penalty) {
    if (penalty == PenaltyWeighting::unweighted) return 1.0;
    return weights.sum() / static_cast<double>(design.n_obs());
}

// Cholesky of the weighted normal matrix, or the retry signal.
Eigen::LLT<Mat> factor_weighted(const Mat& h) {
    Eigen::LLT<Mat> llt(h);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
        const Vec d = llt.matrixLLT().diagonal();
        const double ratio = d.minCoeff() / d.maxCoeff();
        ok = std::isfinite(ratio) && ratio * ratio > 1e-14;
    }
    if (!ok) throw IndefiniteWeightsError("weighted normal matrix is not positive definite");
    return llt;
}

} // namespace

Vec draw_weights(int n, RngEngine& engine) {
    if (n < 1) throw DimensionError("draw_weights: n must be positive");
    boost::random::normal_distribution<double> nd(1.0, 1.0);
    Vec u(n);
    for (int i = 0; i < n; ++i) u(i) = nd(engine);
    return u;
}

Vec draw_weights(int n, const RngStream& rng) {
    auto eng = rng.engine();
    return draw_weights(n, eng);
}

double boot_loglik(const GeneralDesign& design, const Vec& weights, const Vec& theta, PenaltyWeighting penalty) {
    check_weights(design, weights);
    if (theta.size() != design.dim()) throw DimensionError("theta length differs from basis dimension");
    double ss = 0.0;
    for (int k = 0; k < design.n_moments(); ++k) {
        const Vec r = design.zk.row(k).transpose() - design.eta[static_cast<std::size_t>(k)] * theta;
        ss += (r.array().square() * weights.array()).sum();
    }
    return -0.5 * ss - 0.5 * design.penalty * penalty_scale(design, weights, penalty) * theta.squaredNorm();
}

Mat boot_normal_matrix(const GeneralDesign& design, const Vec& weights, PenaltyWeighting penalty) {
    check_weights(design, weights);
    const int j = design.dim();
    Mat h = (design.penalty * penalty_scale(design, weights, penalty)) * Mat::Identity(j, j);
    for (const auto& e : design.eta) {
        const Mat scaled = weights.asDiagonal() * e;
        h.noalias() += e.transpose() * scaled;
    }
    return h;
}

Vec boot_cross_moment(const GeneralDesign& design, const Vec& weights) {
    check_weights(design, weights);
    Vec b = Vec::Zero(design.dim());
    for (int k = 0; k < design.n_moments(); ++k) {
        const Vec wz = design.zk.row(k).transpose().cwiseProduct(weights);
        b.noalias() += design.eta[static_cast<std::size_t>(k)].transpose() * wz;
    }
    return b;
}

Vec boot_mle(const GeneralDesign& design, const Vec& weights, PenaltyWeighting penalty) {
    const Mat h = boot_normal_matrix(design, weights, penalty);
    return factor_weighted(h).solve(boot_cross_moment(design, weights));
}

double t_blr(const GeneralDesign& design, const Vec& weights, const Mat& projector,
             const std::optional<Vec>& theta_tilde, PenaltyWeighting penalty) {
    if (projector.rows() != design.dim() || projector.cols() != design.dim()) {
        throw DimensionError("projector must be J x J");
    }
    const auto bases = linalg::constraint_bases(projector);
    if (bases.tested.cols() == 0) return 0.0;
    const Vec center = theta_tilde ? *theta_tilde : mle(design);
    const Mat h = boot_normal_matrix(design, weights, penalty);
    const Vec b = boot_cross_moment(design, weights);
    const auto llt = factor_weighted(h);
    const Vec full = llt.solve(b);

    const Mat& nb = bases.free;
    Vec restricted = center;
    if (nb.cols() > 0) {
        const Mat hr = nb.transpose() * h * nb;
        const auto lr = factor_weighted(hr);
        restricted += nb * lr.solve(nb.transpose() * (b - h * center));
    }
    const Vec d = full - restricted;
    return 0.5 * d.dot(h * d);
}

BootstrapRun boot_quantile(const GeneralDesign& design, const Mat& projector, int n_boot, double alpha,
                           const RngStream& rng, const BootstrapOptions& options) {
    if (n_boot < 100) throw ConfigError("boot_quantile: B must be at least 100");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("boot_quantile: alpha must lie in (0, 1)");
    const Vec center = mle(design);
    const double j = design.dim();
    const int max_retries = static_cast<int>(std::floor(options.max_retry_fraction * n_boot));

    BootstrapRun run;
    run.n_boot = n_boot;
    run.alpha = alpha;
    run.t_blr_samples.reserve(static_cast<std::size_t>(n_boot));
    for (int b = 0; b < n_boot; ++b) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            const Vec u = draw_weights(design.n_obs(), rng.substream({static_cast<std::uint64_t>(b), attempt}));
            try {
                run.t_blr_samples.push_back(t_blr(design, u, projector, center, options.penalty));
                break;
            } catch (const IndefiniteWeightsError&) {
                if (++run.retries > max_retries) {
                    throw BootstrapAbort("boot_quantile: " + std::to_string(run.retries) +
                                         " weight redraws exceed the allowed fraction of B=" +
                                         std::to_string(n_boot));
                }
            }
        }
    }
    std::vector<double> standardized(run.t_blr_samples);
    for (double& t : standardized) t = (t - j) / std::sqrt(j);
    run.z_star_alpha = stats::upper_quantile(std::move(standardized), alpha);
    return run;
}

TestOutcome blr_test(const GeneralDesign& design, const Mat& /*projector*/, double t_lr_value,
                     const BootstrapRun& run) {
    const double j = design.dim();
    TestOutcome out;
    out.name = "BLR";
    out.statistic = t_lr_value;
    out.critical_value = j + run.z_star_alpha * std::sqrt(j);
    out.reject = t_lr_value > out.critical_value;
    return out;
}

ScoreDecomposition boot_score_decomposition(const GeneralDesign& design, const Vec& weights, const Mat& projector,
                                            const std::optional<Vec>& theta_tilde,
                                            const std::optional<Mat>& expected_fisher, PenaltyWeighting penalty) {
    const Vec center = theta_tilde ? *theta_tilde : mle(design);
    const Mat h = boot_normal_matrix(design, weights, penalty);
    const Vec g = boot_cross_moment(design, weights) - h * center;
    return decompose_score(g, expected_fisher ? *expected_fisher : normal_matrix(design), projector);
}

double boot_wilks_gap(const GeneralDesign& design, const Vec& weights, const Mat& projector,
                      const std::optional<Mat>& expected_fisher, PenaltyWeighting penalty) {
    const Vec center = mle(design);
    const double t = t_blr(design, weights, projector, center, penalty);
    const auto sd = boot_score_decomposition(design, weights, projector, center, expected_fisher, penalty);
    return std::abs(std::sqrt(2.0 * std::max(t, 0.0)) - sd.xi_s.norm());
}

} // namespace ivboot
