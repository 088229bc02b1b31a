#pragma once

#include <optional>
#include <vector>

#include "ivboot/quasi_likelihood.hpp"
#include "ivboot/rng.hpp"
#include "ivboot/types.hpp"

namespace ivboot {

// Whether each observation's share of the ridge penalty carries its weight.
enum class PenaltyWeighting { weighted, unweighted };

struct BootstrapOptions {
    PenaltyWeighting penalty = PenaltyWeighting::weighted;
    // Abort once redraws exceed this fraction of B.
    double max_retry_fraction = 0.01;
};

struct BootstrapRun {
    int n_boot = 0;
    std::vector<double> t_blr_samples;
    double z_star_alpha = 0.0;
    double alpha = 0.05;
    int retries = 0;
};

// n independent N(1, 1) multipliers.
Vec draw_weights(int n, const RngStream& rng);
Vec draw_weights(int n, RngEngine& engine);

double boot_loglik(const GeneralDesign& design, const Vec& weights, const Vec& theta,
                   PenaltyWeighting penalty = PenaltyWeighting::weighted);

Mat boot_normal_matrix(const GeneralDesign& design, const Vec& weights,
                       PenaltyWeighting penalty = PenaltyWeighting::weighted);
Vec boot_cross_moment(const GeneralDesign& design, const Vec& weights);

// Throws IndefiniteWeightsError when the weighted normal matrix is not
// positive definite.
Vec boot_mle(const GeneralDesign& design, const Vec& weights,
             PenaltyWeighting penalty = PenaltyWeighting::weighted);

// Bootstrap LR for the hypothesis P (theta - theta_tilde) = 0 centered at the
// full-sample estimate. theta_tilde is recomputed when not supplied.
double t_blr(const GeneralDesign& design, const Vec& weights, const Mat& projector,
             const std::optional<Vec>& theta_tilde = std::nullopt,
             PenaltyWeighting penalty = PenaltyWeighting::weighted);

BootstrapRun boot_quantile(const GeneralDesign& design, const Mat& projector, int n_boot, double alpha,
                           const RngStream& rng, const BootstrapOptions& options = {});

// Reject iff t_lr_value > J + z * sqrt(J).
TestOutcome blr_test(const GeneralDesign& design, const Mat& projector, double t_lr_value, const BootstrapRun& run);

// Profile score of the bootstrap likelihood at theta_tilde, standardized by
// the (expected) Fisher matrix.
ScoreDecomposition boot_score_decomposition(const GeneralDesign& design, const Vec& weights, const Mat& projector,
                                            const std::optional<Vec>& theta_tilde = std::nullopt,
                                            const std::optional<Mat>& expected_fisher = std::nullopt,
                                            PenaltyWeighting penalty = PenaltyWeighting::weighted);

// | sqrt(2 max(T_BLR, 0)) - |xi_s| | for one weight draw.
double boot_wilks_gap(const GeneralDesign& design, const Vec& weights, const Mat& projector,
                      const std::optional<Mat>& expected_fisher = std::nullopt,
                      PenaltyWeighting penalty = PenaltyWeighting::weighted);

} // namespace ivboot
