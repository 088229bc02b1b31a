#pragma once

#include <optional>
#include <vector>

#include "ivboot/types.hpp"

namespace ivboot {

// Population moment system eta_star * x = rhs. Row k holds E W^k psi_j(X);
// rhs(k) = E W^k Y - delta_k.
struct MomentSystem {
    Mat eta_star;
    Vec rhs;
    std::optional<double> c_ident;

    void validate() const;
};

struct MinNormSolution {
    Vec x;
    int rank = 0;
    bool dropped_redundant_rows = false;
    // Squared norm of x, reported as the identification constant.
    double c_ident = 0.0;
};

// Unique solution of a single moment equation eta1' x = ewy of minimal norm.
Vec single_iv_solution(const Vec& eta1, double ewy);

MinNormSolution min_norm_solution(const MomentSystem& system);

enum class Completeness { complete, incomplete };

struct RankReport {
    int rank = 0;
    int dim = 0;
    Completeness completeness = Completeness::incomplete;
};

// per_obs[i] is the K x J matrix of eta_{k,i}. Only the first j_max basis
// columns enter the Gram sum.
RankReport rank_classify(const std::vector<Mat>& per_obs, int j_max);
RankReport rank_classify(const GeneralDesign& design);

enum class StrengthClass { weak, semi_strong, strong };

struct StrengthBands {
    double weak_below = 0.2;
    double strong_above = 0.8;
};

struct StrengthReport {
    std::vector<std::pair<int, double>> lambda_max_curve;
    double exponent = 0.0;
    StrengthClass strength = StrengthClass::weak;
};

// moments[m] is the accumulated (PSD) moment matrix at sample size sizes[m].
StrengthReport strength_classify(const std::vector<Mat>& moments, const std::vector<int>& sizes,
                                 StrengthBands bands = {});

// Gram sums sum_{i < m} sum_k eta_{k,i} eta_{k,i}' at each requested m.
std::vector<Mat> accumulated_moments(const GeneralDesign& design, const std::vector<int>& sizes);

// Euclidean norm of the coefficients beyond the first J.
double nonparam_bias_tail(const Vec& coeffs, int n_basis);

const char* to_string(StrengthClass c);
const char* to_string(Completeness c);

} // namespace ivboot
