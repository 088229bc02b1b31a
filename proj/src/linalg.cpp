#include "ivboot/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ivboot/errors.hpp"

namespace ivboot::linalg {

Mat sym_power(const Mat& s, double power) {
    if (s.rows() != s.cols()) throw DimensionError("sym_power: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    Vec ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (power < 0.0 && ev(i) <= 1e-14 * scale) {
            throw SingularDesignError("sym_power: matrix is not positive definite");
        }
        ev(i) = std::pow(std::max(ev(i), 0.0), power);
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Mat inv_sqrt_spd(const Mat& s) { return sym_power(s, -0.5); }

int numerical_rank(const Mat& a, double rel_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    const Vec& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rel_tol * sv(0)) ++r;
    }
    return r;
}

bool is_idempotent(const Mat& p, double tol) {
    if (p.rows() != p.cols()) return false;
    return ((p * p - p).cwiseAbs().maxCoeff()) <= tol * std::max(1.0, p.cwiseAbs().maxCoeff());
}

ConstraintBases constraint_bases(const Mat& projector, double rel_tol) {
    if (projector.rows() != projector.cols()) {
        throw DimensionError("projector must be square");
    }
    if (!is_idempotent(projector)) {
        throw DimensionError("projector must be idempotent");
    }
    const auto dim = projector.rows();
    Eigen::JacobiSVD<Mat> svd(projector, Eigen::ComputeFullV);
    const Vec& sv = svd.singularValues();
    Eigen::Index r = 0;
    const double top = sv.size() > 0 ? sv(0) : 0.0;
    if (top > 0.0) {
        while (r < sv.size() && sv(r) > rel_tol * std::max(top, 1.0)) ++r;
    }
    ConstraintBases out;
    out.tested = svd.matrixV().leftCols(r);
    out.free = svd.matrixV().rightCols(dim - r);
    return out;
}

Vec solve_spd(const Mat& h, const Vec& b, const char* what) {
    Eigen::LLT<Mat> llt(h);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
        const Vec d = llt.matrixLLT().diagonal();
        const double ratio = d.minCoeff() / d.maxCoeff();
        // Cholesky pivots squared track the eigenvalue spread
        ok = std::isfinite(ratio) && ratio * ratio > 1e-14;
    }
    if (!ok) {
        throw SingularDesignError(std::string(what) +
                                  ": normal matrix is singular; use a positive penalty");
    }
    return llt.solve(b);
}

double lambda_max_sym(const Mat& s) {
    if (s.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

} // namespace ivboot::linalg
