#include "ivboot/quasi_likelihood.hpp"

#include <cmath>

#include "ivboot/errors.hpp"
#include "ivboot/linalg.hpp"

namespace ivboot {

namespace {

void check_theta(const GeneralDesign& design, const Vec& theta) {
    if (theta.size() != design.dim()) throw DimensionError("theta length differs from basis dimension");
}

void check_projector(const GeneralDesign& design, const Mat& projector) {
    if (projector.rows() != design.dim() || projector.cols() != design.dim()) {
        throw DimensionError("projector must be J x J");
    }
    if (!linalg::is_idempotent(projector)) throw DimensionError("projector must be idempotent");
}

} // namespace

Mat normal_matrix(const GeneralDesign& design) {
    design.validate();
    const int j = design.dim();
    Mat h = design.penalty * Mat::Identity(j, j);
    for (const auto& e : design.eta) h.noalias() += e.transpose() * e;
    return h;
}

Vec cross_moment(const GeneralDesign& design) {
    design.validate();
    Vec b = Vec::Zero(design.dim());
    for (int k = 0; k < design.n_moments(); ++k) {
        b.noalias() += design.eta[static_cast<std::size_t>(k)].transpose() * design.zk.row(k).transpose();
    }
    return b;
}

double loglik(const GeneralDesign& design, const Vec& theta) {
    design.validate();
    check_theta(design, theta);
    double ss = 0.0;
    for (int k = 0; k < design.n_moments(); ++k) {
        ss += (design.zk.row(k).transpose() - design.eta[static_cast<std::size_t>(k)] * theta).squaredNorm();
    }
    return -0.5 * ss - 0.5 * design.penalty * theta.squaredNorm();
}

Vec loglik_gradient(const GeneralDesign& design, const Vec& theta) {
    check_theta(design, theta);
    return cross_moment(design) - normal_matrix(design) * theta;
}

Vec mle(const GeneralDesign& design) {
    return linalg::solve_spd(normal_matrix(design), cross_moment(design), "mle");
}

Vec restricted_mle(const GeneralDesign& design, const Mat& projector) {
    check_projector(design, projector);
    const auto bases = linalg::constraint_bases(projector);
    const Mat& free = bases.free;
    if (free.cols() == 0) return Vec::Zero(design.dim());
    const Mat h = normal_matrix(design);
    const Vec b = cross_moment(design);
    const Mat hr = free.transpose() * h * free;
    const Vec nu = linalg::solve_spd(hr, free.transpose() * b, "restricted_mle");
    return free * nu;
}

double t_lr(const GeneralDesign& design, const Mat& projector) {
    const Mat h = normal_matrix(design);
    const Vec d = mle(design) - restricted_mle(design, projector);
    return 0.5 * d.dot(h * d);
}

FitResult fit(const GeneralDesign& design, const Mat& projector) {
    FitResult r;
    r.d0 = normal_matrix(design);
    r.projector = projector;
    r.theta_hat = mle(design);
    r.theta_restricted = restricted_mle(design, projector);
    r.loglik_full = loglik(design, r.theta_hat);
    r.loglik_restricted = loglik(design, r.theta_restricted);
    const Vec d = r.theta_hat - r.theta_restricted;
    r.t_lr = 0.5 * d.dot(r.d0 * d);
    return r;
}

double fallback_penalty(const GeneralDesign& design) {
    design.validate();
    double tr = 0.0;
    for (const auto& e : design.eta) tr += e.squaredNorm();
    return 1e-6 * tr / design.dim();
}

ScoreDecomposition decompose_score(const Vec& gradient, const Mat& fisher, const Mat& projector) {
    const auto j = gradient.size();
    if (fisher.rows() != j || fisher.cols() != j || projector.rows() != j || projector.cols() != j) {
        throw DimensionError("decompose_score: inconsistent dimensions");
    }
    const auto bases = linalg::constraint_bases(projector);
    const Mat& p = bases.tested;
    const Mat& nb = bases.free;

    ScoreDecomposition out;
    const Mat h_pp = p.transpose() * fisher * p;
    const Vec g_p = p.transpose() * gradient;
    if (nb.cols() == 0) {
        out.xi = linalg::inv_sqrt_spd(fisher) * gradient;
        out.fisher_eff = h_pp;
        out.xi_s = p.cols() == 0 ? Vec() : Vec(linalg::inv_sqrt_spd(h_pp) * g_p);
        return out;
    }
    const Mat h_pn = p.transpose() * fisher * nb;
    const Mat h_nn = nb.transpose() * fisher * nb;
    Eigen::LLT<Mat> llt(h_nn);
    if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 1e-7 * llt.matrixLLT().diagonal().maxCoeff()) {
        throw SingularNuisanceError("decompose_score: nuisance block of the Fisher matrix is singular");
    }
    out.xi = linalg::inv_sqrt_spd(fisher) * gradient;
    const Vec g_n = nb.transpose() * gradient;
    out.fisher_eff = h_pp - h_pn * llt.solve(h_pn.transpose());
    out.fisher_eff = 0.5 * (out.fisher_eff + out.fisher_eff.transpose());
    if (p.cols() == 0) {
        out.xi_s = Vec();
        return out;
    }
    out.xi_s = linalg::inv_sqrt_spd(out.fisher_eff) * (g_p - h_pn * llt.solve(g_n));
    return out;
}

ScoreDecomposition score_decomposition(const GeneralDesign& design, const Vec& theta_star, const Mat& projector,
                                       const std::optional<Mat>& expected_fisher) {
    check_projector(design, projector);
    const Vec g = loglik_gradient(design, theta_star);
    return decompose_score(g, expected_fisher ? *expected_fisher : normal_matrix(design), projector);
}

double wilks_gap(const GeneralDesign& design, const Mat& projector, const Vec& theta_star,
                 const std::optional<Mat>& expected_fisher) {
    const double t = t_lr(design, projector);
    const auto sd = score_decomposition(design, theta_star, projector, expected_fisher);
    return std::abs(std::sqrt(2.0 * std::max(t, 0.0)) - sd.xi_s.norm());
}

} // namespace ivboot
