#include "ivboot/identify.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ivboot/errors.hpp"
#include "ivboot/linalg.hpp"
#include "ivboot/stats.hpp"

namespace ivboot {

void MomentSystem::validate() const {
    if (eta_star.rows() < 1 || eta_star.cols() < 1) {
        throw DimensionError("MomentSystem: need K >= 1 and J >= 1");
    }
    if (rhs.size() != eta_star.rows()) throw DimensionError("MomentSystem: rhs must have K entries");
    if (!eta_star.allFinite() || !rhs.allFinite()) throw DimensionError("MomentSystem: non-finite entries");
    if (c_ident && *c_ident < 0.0) throw DimensionError("MomentSystem: c_ident must be nonnegative");
}

Vec single_iv_solution(const Vec& eta1, double ewy) {
    const double nrm2 = eta1.squaredNorm();
    if (eta1.size() == 0 || nrm2 == 0.0) {
        throw IdentificationError("single_iv_solution: instrument moments vanish; equation does not identify");
    }
    return (ewy / nrm2) * eta1;
}

MinNormSolution min_norm_solution(const MomentSystem& system) {
    system.validate();
    const Mat& a = system.eta_star;
    const Vec& b = system.rhs;
    const Mat gram = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    const Vec& ev = es.eigenvalues();
    const double top = ev.maxCoeff();

    // eigenvalues of AA' are squared singular values of A; eigensolver
    // round-off sits near 1e-16 * top, so the cut is kept well above it
    Vec inv = Vec::Zero(ev.size());
    int rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (top > 0.0 && ev(i) > 1e-12 * top) {
            inv(i) = 1.0 / ev(i);
            ++rank;
        }
    }
    const Mat& v = es.eigenvectors();
    MinNormSolution out;
    out.x = a.transpose() * (v * (inv.asDiagonal() * (v.transpose() * b)));
    out.rank = rank;
    out.dropped_redundant_rows = rank < a.rows();

    const double resid = (a * out.x - b).norm();
    const double scale = 1.0 + b.norm();
    if (resid > 1e-10 * scale * std::max(1.0, std::sqrt(top))) {
        throw InfeasibleError("min_norm_solution: moment equations are inconsistent");
    }
    out.c_ident = out.x.squaredNorm();
    return out;
}

RankReport rank_classify(const std::vector<Mat>& per_obs, int j_max) {
    if (per_obs.empty()) throw DimensionError("rank_classify: no observations");
    const auto k = per_obs.front().rows();
    const auto j = per_obs.front().cols();
    if (j_max < 1 || j_max > j) throw DimensionError("rank_classify: j_max outside [1, J]");
    Mat gram = Mat::Zero(j_max, j_max);
    for (const auto& m : per_obs) {
        if (m.rows() != k || m.cols() != j) throw DimensionError("rank_classify: inconsistent K x J blocks");
        const auto lead = m.leftCols(j_max);
        gram.noalias() += lead.transpose() * lead;
    }
    RankReport r;
    r.dim = j_max;
    r.rank = linalg::numerical_rank(gram, 1e-8);
    r.completeness = r.rank == j_max ? Completeness::complete : Completeness::incomplete;
    return r;
}

RankReport rank_classify(const GeneralDesign& design) {
    design.validate();
    Mat gram = Mat::Zero(design.dim(), design.dim());
    for (const auto& e : design.eta) gram.noalias() += e.transpose() * e;
    RankReport r;
    r.dim = design.dim();
    r.rank = linalg::numerical_rank(gram, 1e-8);
    r.completeness = r.rank == r.dim ? Completeness::complete : Completeness::incomplete;
    return r;
}

StrengthReport strength_classify(const std::vector<Mat>& moments, const std::vector<int>& sizes,
                                 StrengthBands bands) {
    if (moments.size() != sizes.size()) throw DimensionError("strength_classify: one moment matrix per size");
    std::vector<int> distinct(sizes);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw DimensionError("strength_classify: need at least 3 distinct sizes");
    if (!std::is_sorted(sizes.begin(), sizes.end())) throw DimensionError("strength_classify: sizes must increase");

    StrengthReport rep;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double s = linalg::lambda_max_sym(moments[i]);
        rep.lambda_max_curve.emplace_back(sizes[i], s);
        xs.push_back(sizes[i]);
        ys.push_back(s);
    }
    rep.exponent = stats::loglog_slope(xs, ys);
    if (rep.exponent < bands.weak_below) {
        rep.strength = StrengthClass::weak;
    } else if (rep.exponent <= bands.strong_above) {
        rep.strength = StrengthClass::semi_strong;
    } else {
        rep.strength = StrengthClass::strong;
    }
    return rep;
}

std::vector<Mat> accumulated_moments(const GeneralDesign& design, const std::vector<int>& sizes) {
    design.validate();
    std::vector<Mat> out;
    for (int m : sizes) {
        if (m < 1 || m > design.n_obs()) throw DimensionError("accumulated_moments: size outside [1, n]");
        Mat g = Mat::Zero(design.dim(), design.dim());
        for (const auto& e : design.eta) g.noalias() += e.topRows(m).transpose() * e.topRows(m);
        out.push_back(std::move(g));
    }
    return out;
}

double nonparam_bias_tail(const Vec& coeffs, int n_basis) {
    if (n_basis < 0 || n_basis > coeffs.size()) {
        throw DimensionError("nonparam_bias_tail: J must not exceed the sequence length");
    }
    return coeffs.tail(coeffs.size() - n_basis).norm();
}

const char* to_string(StrengthClass c) {
    switch (c) {
    case StrengthClass::weak: return "weak";
    case StrengthClass::semi_strong: return "semi_strong";
    case StrengthClass::strong: return "strong";
    }
    return "?";
}

const char* to_string(Completeness c) { return c == Completeness::complete ? "complete" : "incomplete"; }

} // namespace ivboot
