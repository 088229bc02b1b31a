#pragma once

#include <optional>

#include "ivboot/types.hpp"

namespace ivboot {

// Penalized quasi log-likelihood
//   L(theta) = -1/2 sum_k sum_i (Z^i_k - eta^i_k' theta)^2 - penalty |theta|^2 / 2
// and its maximizers. Everything is exactly quadratic, so maximizers come from
// the normal equations H theta = b with H = sum eta eta' + penalty I.

struct FitResult {
    Vec theta_hat;
    Vec theta_restricted;
    double loglik_full = 0.0;
    double loglik_restricted = 0.0;
    double t_lr = 0.0;
    Mat d0;         // normal matrix H (the Fisher matrix of the quadratic model)
    Mat projector;
};

struct ScoreDecomposition {
    Vec xi;          // H^{-1/2} grad L(theta*)
    Vec xi_s;        // profile score of the tested block
    Mat fisher_eff;  // Schur complement of the nuisance block
};

Mat normal_matrix(const GeneralDesign& design);
Vec cross_moment(const GeneralDesign& design);

double loglik(const GeneralDesign& design, const Vec& theta);
Vec loglik_gradient(const GeneralDesign& design, const Vec& theta);

Vec mle(const GeneralDesign& design);
Vec restricted_mle(const GeneralDesign& design, const Mat& projector);

// sup L - sup_{P theta = 0} L, evaluated as (theta_hat - theta_r)' H (theta_hat - theta_r) / 2.
double t_lr(const GeneralDesign& design, const Mat& projector);

FitResult fit(const GeneralDesign& design, const Mat& projector);

// Penalty used when the unpenalized normal matrix is numerically singular:
// 1e-6 * trace(sum eta eta') / J.
double fallback_penalty(const GeneralDesign& design);

// Block decomposition of a score vector against a Fisher matrix. The tested
// block is the orthogonal complement of {theta : P theta = 0}.
ScoreDecomposition decompose_score(const Vec& gradient, const Mat& fisher, const Mat& projector);

// Score at theta_star. The Fisher matrix defaults to the sample normal matrix;
// pass the population matrix when it is known.
ScoreDecomposition score_decomposition(const GeneralDesign& design, const Vec& theta_star, const Mat& projector,
                                       const std::optional<Mat>& expected_fisher = std::nullopt);

// | sqrt(2 max(T_LR, 0)) - |xi_s| |
double wilks_gap(const GeneralDesign& design, const Mat& projector, const Vec& theta_star,
                 const std::optional<Mat>& expected_fisher = std::nullopt);

} // namespace ivboot
