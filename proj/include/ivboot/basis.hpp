#pragma once

#include "ivboot/types.hpp"

namespace ivboot {

// J x n matrix with entry (j, i) = cos(2 pi i j / n), i and j starting at 1.
Mat cosine_design(int n, int n_basis);

Mat basis_matrix(const BasisSpec& spec, int n);

// instruments: K x n values W^k_i. basis: J x n values psi_j(X_i).
// responses: n values Y_i. delta: K biases subtracted from W^k_i Y_i.
GeneralDesign build_general_design(const Mat& instruments, const Mat& basis, const Vec& responses,
                                   const Vec& delta, double penalty);

} // namespace ivboot
