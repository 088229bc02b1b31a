#pragma once

#include <cmath>
#include <functional>

#include <boost/random/normal_distribution.hpp>

#include "ivboot/rng.hpp"
#include "ivboot/types.hpp"

namespace ivboot::testing {

inline Mat gaussian_matrix(int rows, int cols, RngEngine& eng) {
    boost::random::normal_distribution<double> nd;
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = nd(eng);
    return m;
}

inline Vec gaussian_vector(int n, RngEngine& eng) { return gaussian_matrix(n, 1, eng).col(0); }

inline GeneralDesign random_design(int k, int n, int j, double penalty, RngEngine& eng) {
    GeneralDesign d;
    for (int i = 0; i < k; ++i) d.eta.push_back(gaussian_matrix(n, j, eng));
    d.zk = gaussian_matrix(k, n, eng);
    d.penalty = penalty;
    return d;
}

// Derivative-free compass search maximizer.
inline Vec compass_maximize(const std::function<double(const Vec&)>& f, Vec x, double step = 1.0,
                            double tol = 1e-9) {
    double fx = f(x);
    while (step > tol) {
        bool improved = false;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            for (double s : {step, -step}) {
                Vec y = x;
                y(i) += s;
                const double fy = f(y);
                if (fy > fx) {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return x;
}

} // namespace ivboot::testing
