#include "ivboot/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "ivboot/errors.hpp"

namespace ivboot {

void IvSample::validate() const {
    if (y1.size() == 0 || y1.size() != y2.size()) {
        throw DimensionError("IvSample: y1 and y2 must be non-empty and of equal length");
    }
    if (z.cols() != y1.size() || z.rows() < 1) {
        throw DimensionError("IvSample: z must have one column per observation");
    }
    if (!omega.isApprox(omega.transpose(), 1e-12)) {
        throw DimensionError("IvSample: omega must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat2> es(omega, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw DimensionError("IvSample: omega must be positive definite");
    }
    if (truth && truth->pi_star.size() != z.rows()) {
        throw DimensionError("IvSample: pi_star length differs from instrument count");
    }
}

void GeneralDesign::validate() const {
    if (eta.empty()) throw DimensionError("GeneralDesign: K must be at least 1");
    if (!(penalty >= 0.0)) throw DimensionError("GeneralDesign: penalty must be nonnegative");
    const auto n = eta.front().rows();
    const auto j = eta.front().cols();
    if (n < 1 || j < 1) throw DimensionError("GeneralDesign: empty basis or sample");
    if (zk.rows() != static_cast<Eigen::Index>(eta.size()) || zk.cols() != n) {
        throw DimensionError("GeneralDesign: zk must be K x n");
    }
    for (const auto& e : eta) {
        if (e.rows() != n || e.cols() != j) {
            throw DimensionError("GeneralDesign: every eta block must be n x J");
        }
    }
}

Mat cosine_design(int n, int n_basis) {
    if (n < 1 || n_basis < 1) {
        throw DimensionError("cosine_design: n and J must be positive");
    }
    Mat z(n_basis, n);
    for (int j = 1; j <= n_basis; ++j) {
        for (int i = 1; i <= n; ++i) {
            // reduce i*j mod n first so large products keep full precision
            const long long r = (static_cast<long long>(i) * j) % n;
            z(j - 1, i - 1) = std::cos(2.0 * std::numbers::pi * static_cast<double>(r) / n);
        }
    }
    return z;
}

Mat basis_matrix(const BasisSpec& spec, int n) {
    if (spec.n_basis < 1) throw DimensionError("BasisSpec: n_basis must be positive");
    switch (spec.kind) {
    case BasisKind::cosine:
        return cosine_design(n, spec.n_basis);
    }
    throw ConfigError("unknown basis kind");
}

GeneralDesign build_general_design(const Mat& instruments, const Mat& basis, const Vec& responses,
                                   const Vec& delta, double penalty) {
    const auto k = instruments.rows();
    const auto n = instruments.cols();
    if (k < 1 || n < 1) throw DimensionError("build_general_design: empty instrument matrix");
    if (basis.cols() != n || basis.rows() < 1) {
        throw DimensionError("build_general_design: basis must be J x n");
    }
    if (responses.size() != n) throw DimensionError("build_general_design: responses must have n entries");
    if (delta.size() != k) throw DimensionError("build_general_design: delta must have K entries");
    if (!(penalty >= 0.0)) throw DimensionError("build_general_design: penalty must be nonnegative");

    GeneralDesign d;
    d.penalty = penalty;
    d.eta.reserve(static_cast<std::size_t>(k));
    d.zk.resize(k, n);
    const Mat basis_t = basis.transpose();
    for (Eigen::Index r = 0; r < k; ++r) {
        d.eta.push_back(instruments.row(r).transpose().asDiagonal() * basis_t);
        d.zk.row(r) = instruments.row(r).cwiseProduct(responses.transpose()).array() - delta(r);
    }
    return d;
}

} // namespace ivboot
