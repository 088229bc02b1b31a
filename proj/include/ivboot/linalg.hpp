#pragma once

#include "ivboot/types.hpp"

namespace ivboot::linalg {

// Symmetric matrix power via eigendecomposition. Negative powers require
// strictly positive eigenvalues.
Mat sym_power(const Mat& s, double power);
Mat inv_sqrt_spd(const Mat& s);

int numerical_rank(const Mat& a, double rel_tol = 1e-8);
bool is_idempotent(const Mat& p, double tol = 1e-10);

// Orthonormal bases adapted to a projector P: `free` spans {x : P x = 0},
// `tested` spans its orthogonal complement.
struct ConstraintBases {
    Mat free;
    Mat tested;
};
ConstraintBases constraint_bases(const Mat& projector, double rel_tol = 1e-10);

// Cholesky solve. Throws SingularDesignError when h is not numerically
// positive definite.
Vec solve_spd(const Mat& h, const Vec& b, const char* what);

double lambda_max_sym(const Mat& s);

} // namespace ivboot::linalg
