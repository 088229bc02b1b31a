#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ivboot/rng.hpp"
#include "ivboot/types.hpp"

namespace ivboot {

// ---------------------------------------------------------------------------
// Deviation function z^2(x, X)
// ---------------------------------------------------------------------------

struct DeviationParams {
    double x = 0.0;
    Mat x2;  // X^2, symmetric PSD
    double g = 0.0;

    void validate() const;
};

struct DeviationConstants {
    double tr_x2 = 0.0;
    double tr_x4 = 0.0;
    double lambda_max = 0.0;
    double x_low = 0.0;  // end of the square-root branch
    double x_c = 0.0;    // start of the linear-in-sqrt branch
    double z_c = 0.0;
    double g_c = 0.0;
};

DeviationConstants deviation_constants(const Mat& x2, double g);

// Three-branch piecewise deviation bound:
//   tr X^2 + sqrt(8 tr X^4 x)             x <= sqrt(2 tr X^4) / (18 lambda)
//   tr X^2 + 6 x lambda                   up to x_c
//   |z_c + 2 (x - x_c) / g_c|^2 lambda    x >= x_c
// with lambda = lambda_max(X^2).
double z_function(const DeviationParams& params);

// 2 sqrt(2 tr X^2)
double default_deviation_g(const Mat& x2);

// ---------------------------------------------------------------------------
// Matrix Bernstein
// ---------------------------------------------------------------------------

// 2 p exp(-t^2 / (2 sigma2 (1 + R t / (3 sigma2)))). Not clamped to 1.
double bernstein_bound(double t, double sigma2, double r_bound, int p);

// summand(engine, i) returns the i-th symmetric p x p summand.
using MatrixSampler = std::function<Mat(RngEngine&, int)>;

// Monte Carlo P(|sum_i S_i|_op >= t) for each t in t_grid.
std::vector<double> empirical_opnorm_tail(const MatrixSampler& summand, int n_summands,
                                          const std::vector<double>& t_grid, int reps, const RngStream& rng,
                                          int threads = 0);

// ---------------------------------------------------------------------------
// Gaussian comparison and approximation
// ---------------------------------------------------------------------------

struct GaussCompareResult {
    double empirical_kolmogorov = 0.0;
    // max_j sqrt(tr Sigma_j) |I - Sigma_0^{-1} Sigma_1|_op
    double bound_factor = 0.0;
};

// Empirical sup_t |P(|xi_1| < t) - P(|xi_0| < t)| on a 512-point grid over the
// pooled 0.1%..99.9% quantile range. xi_0 and xi_1 use substreams 0 and 1 of
// rng, so calls sharing rng share their standard normal draws.
GaussCompareResult gauss_compare_distance(const Mat& sigma0, const Mat& sigma1, int reps, const RngStream& rng);

enum class SummandLaw { gaussian, uniform_cube, rademacher_product };

struct GarPoint {
    int n = 0;
    double distance = 0.0;
    double dkw = 0.0;  // 95% DKW half-width at this reps
};

// For each n: sup-distance between the law of |n^{-1/2} sum_i x_i| (iid x_i
// with identity covariance in dimension J) and the chi distribution with J
// degrees of freedom.
std::vector<GarPoint> gar_scaling_check(SummandLaw law, int dim, const std::vector<int>& n_list, int reps,
                                        const RngStream& rng, int threads = 0);

// ---------------------------------------------------------------------------
// Finite-sample condition report for a quasi-likelihood design
// ---------------------------------------------------------------------------

struct FscReport {
    // max_i |D0^{-1} sum_k eta^i_k| with D0^2 = sum eta eta' + penalty I
    double design_ratio = 0.0;
    bool design_ok = false;
    // lambda_max(sum_k (sigma_k^2 - 1) eta_k' eta_k) against the penalty
    double identifiability_value = 0.0;
    bool identifiability_ok = false;
    std::vector<double> residual_variances;
    // descriptive only
    double max_standardized_residual = 0.0;
    std::vector<std::pair<double, double>> log_mgf;
};

FscReport fsc_design_check(const GeneralDesign& design);

// Single-instrument linear design: X ~ U(0, 1), psi_j(x) = sqrt(2) cos(pi j x),
// W Rademacher, Y = psi(X)' theta_star + N(0, 1), Z = W Y, eta = W psi(X).
GeneralDesign linear_iv_design(int n, const Vec& theta_star, double penalty, RngEngine& engine);

nlohmann::json to_json(const FscReport& report);

SummandLaw parse_summand_law(const std::string& name);

} // namespace ivboot
