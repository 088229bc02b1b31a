#include <catch_amalgamated.hpp>

#include <cmath>

#include "ivboot/diagnostics.hpp"
#include "ivboot/errors.hpp"
#include "ivboot/quasi_likelihood.hpp"
#include "ivboot/stats.hpp"
#include "support.hpp"

using namespace ivboot;
using Catch::Matchers::WithinAbs;

namespace {

GeneralDesign tiny(Vec eta_row, double z, double penalty) {
    GeneralDesign d;
    d.eta.push_back(eta_row.transpose());
    d.zk = Mat::Constant(1, 1, z);
    d.penalty = penalty;
    return d;
}

Vec v2(double a, double b) { return Vec2(a, b); }

Mat diag_projector(std::initializer_list<double> entries) {
    Vec d(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index i = 0;
    for (double x : entries) d(i++) = x;
    return d.asDiagonal();
}

} // namespace

TEST_CASE("loglik examples", "[ql]") {
    GeneralDesign zero;
    zero.eta.push_back(Mat::Ones(3, 2));
    zero.zk = Mat::Zero(1, 3);
    CHECK(loglik(zero, Vec::Zero(2)) == 0.0);
    CHECK(loglik(tiny(v2(1, 0), 2, 0), v2(2, 0)) == 0.0);
    CHECK(loglik(tiny(v2(1, 0), 2, 0), v2(0, 0)) == -2.0);
    CHECK_THROWS_AS(loglik(zero, Vec::Zero(3)), DimensionError);
}

TEST_CASE("mle examples", "[ql]") {
    GeneralDesign zero;
    zero.eta.push_back(Mat::Ones(3, 2));
    zero.zk = Mat::Zero(1, 3);
    zero.penalty = 0.5;
    CHECK(mle(zero).norm() == 0.0);
    CHECK(mle(tiny(v2(1, 0), 2, 1)).isApprox(v2(1, 0)));
    CHECK_THROWS_AS(mle(tiny(v2(1, 0), 2, 0)), SingularDesignError);
}

TEST_CASE("mle matches a derivative-free optimizer", "[ql][oracle]") {
    auto eng = RngStream{21, 0}.engine();
    for (int trial = 0; trial < 5; ++trial) {
        const auto d = testing::random_design(2, 20, 3, 0.3, eng);
        const Vec oracle = testing::compass_maximize([&](const Vec& t) { return loglik(d, t); }, Vec::Zero(3));
        CHECK((mle(d) - oracle).norm() < 1e-4);
    }
}

TEST_CASE("restricted mle examples", "[ql]") {
    auto eng = RngStream{22, 0}.engine();
    const auto d = testing::random_design(2, 20, 2, 0.1, eng);
    CHECK((restricted_mle(d, Mat::Zero(2, 2)) - mle(d)).norm() < 1e-12);
    CHECK(restricted_mle(d, Mat::Identity(2, 2)).norm() == 0.0);

    const Vec r = restricted_mle(d, diag_projector({1, 0}));
    CHECK(std::abs(r(0)) < 1e-14);
    GeneralDesign reduced = d;
    for (auto& e : reduced.eta) e = e.col(1).eval();
    CHECK_THAT(r(1), WithinAbs(mle(reduced)(0), 1e-12));

    CHECK_THROWS_AS(restricted_mle(d, 2.0 * Mat::Identity(2, 2)), DimensionError);
    CHECK_THROWS_AS(restricted_mle(d, Mat::Identity(3, 3)), DimensionError);
}

TEST_CASE("t_lr examples", "[ql]") {
    auto eng = RngStream{23, 0}.engine();
    const auto d = testing::random_design(1, 30, 3, 0.0, eng);
    CHECK(t_lr(d, Mat::Zero(3, 3)) == 0.0);
    CHECK_THAT(t_lr(tiny(Vec::Ones(1), 2, 0), Mat::Identity(1, 1)), WithinAbs(2.0, 1e-14));
    const auto f = fit(d, diag_projector({1, 0, 0}));
    CHECK(f.loglik_full >= f.loglik_restricted);
    CHECK_THAT(f.t_lr, WithinAbs(f.loglik_full - f.loglik_restricted, 1e-9));
    CHECK(std::abs(f.theta_restricted(0)) < 1e-12);
}

TEST_CASE("null distribution of twice T_LR centers at the tested dimension", "[ql][mc]") {
    const Mat proj = diag_projector({1, 1, 0, 0, 0});
    Vec theta = Vec::Zero(5);
    theta(2) = 0.5;
    theta(3) = -0.3;
    theta(4) = 0.2;
    std::vector<double> z;
    for (int r = 0; r < 1000; ++r) {
        auto eng = RngStream{24, 0}.substream(r).engine();
        const auto d = linear_iv_design(2000, theta, 0.0, eng);
        z.push_back((2.0 * t_lr(d, proj) - 2.0) / std::sqrt(2.0));
    }
    // standardized chi2_2 has unit variance
    CHECK(std::abs(stats::mean(z)) < 4.0 / std::sqrt(1000.0));
}

TEST_CASE("score decomposition", "[ql]") {
    auto eng = RngStream{25, 0}.engine();
    SECTION("noiseless data") {
        auto d = testing::random_design(2, 30, 3, 0.0, eng);
        Vec theta = testing::gaussian_vector(3, eng);
        theta(0) = 0.0;
        for (int k = 0; k < 2; ++k) d.zk.row(k) = (d.eta[static_cast<std::size_t>(k)] * theta).transpose();
        const auto s = score_decomposition(d, theta, diag_projector({1, 0, 0}));
        CHECK(s.xi.norm() < 1e-10);
        CHECK(s.xi_s.norm() < 1e-10);
        CHECK(wilks_gap(d, diag_projector({1, 0, 0}), theta) < 1e-10);
    }
    SECTION("full projector gives xi_s = xi") {
        const auto d = testing::random_design(1, 30, 3, 0.2, eng);
        const auto s = score_decomposition(d, Vec::Zero(3), Mat::Identity(3, 3));
        CHECK(s.xi.norm() > 0.0);
        CHECK_THAT(s.xi_s.norm(), WithinAbs(s.xi.norm(), 1e-10));
    }
    SECTION("quadratic Wilks identity") {
        for (int trial = 0; trial < 20; ++trial) {
            const auto d = testing::random_design(2, 40, 4, 0.1 * trial, eng);
            const Mat proj = diag_projector({1, 0, 1, 0});
            const Vec theta = restricted_mle(d, proj);
            const auto s = score_decomposition(d, theta, proj);
            CHECK_THAT(s.xi_s.squaredNorm(), WithinAbs(2.0 * t_lr(d, proj), 1e-8 * (1.0 + s.xi_s.squaredNorm())));
            CHECK(wilks_gap(d, proj, theta) <= 1e-8);
            const Eigen::SelfAdjointEigenSolver<Mat> es(s.fisher_eff);
            CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        }
    }
    SECTION("singular nuisance block") {
        Mat fisher = Mat::Identity(2, 2);
        fisher(1, 1) = 0.0;
        CHECK_THROWS_AS(decompose_score(Vec::Ones(2), fisher, diag_projector({1, 0})), SingularNuisanceError);
    }
}

TEST_CASE("quasi-likelihood properties", "[ql][property]") {
    auto eng = RngStream{26, 0}.engine();
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = testing::random_design(1 + trial % 3, 25, 1 + trial % 5, 0.05 * (trial % 4), eng);
        const int j = d.dim();
        Mat proj = Mat::Zero(j, j);
        proj(0, 0) = 1.0;
        CHECK(t_lr(d, proj) >= -1e-10);
        const Vec th = mle(d);
        CHECK(loglik_gradient(d, th).norm() <= 1e-8 * (1.0 + cross_moment(d).norm()));
        for (int r = 0; r < 5; ++r) {
            Vec dir = testing::gaussian_vector(j, eng);
            dir *= 1e-2 / dir.norm();
            CHECK(loglik(d, th + dir) < loglik(d, th));
        }
        GeneralDesign more = d;
        more.penalty = d.penalty + 1.0;
        CHECK(mle(more).norm() <= th.norm() + 1e-10);
    }
}

TEST_CASE("fallback penalty", "[ql]") {
    GeneralDesign d;
    d.eta.push_back(Mat::Ones(4, 2));
    d.zk = Mat::Ones(1, 4);
    CHECK_THAT(fallback_penalty(d), WithinAbs(1e-6 * 8.0 / 2.0, 1e-18));
    CHECK_THROWS_AS(mle(d), SingularDesignError);
    d.penalty = fallback_penalty(d);
    CHECK_NOTHROW(mle(d));
}
