#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ivboot/basis.hpp"
#include "ivboot/errors.hpp"
#include "ivboot/rng.hpp"

using namespace ivboot;
using Catch::Matchers::WithinAbs;

TEST_CASE("cosine design entries", "[basis]") {
    CHECK_THAT(cosine_design(4, 1)(0, 0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(cosine_design(4, 2)(1, 1), WithinAbs(1.0, 1e-15));
    const Mat z = cosine_design(200, 5);
    REQUIRE(z.rows() == 5);
    REQUIRE(z.cols() == 200);
    for (int i = 0; i < z.cols(); ++i) {
        CHECK(std::isfinite(z.col(i).norm()));
        CHECK(z.col(i).norm() <= std::sqrt(200.0));
    }
    // direct evaluation without the modular reduction
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 200; ++i)
            CHECK_THAT(z(j, i), WithinAbs(std::cos(2.0 * std::numbers::pi * (i + 1) * (j + 1) / 200.0), 1e-12));
}

TEST_CASE("cosine rows are near orthogonal at harness defaults", "[basis]") {
    const Mat z = cosine_design(200, 5);
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) CHECK(std::abs(z.row(a).dot(z.row(b))) / 200.0 <= 0.51);
}

TEST_CASE("cosine design rejects bad sizes", "[basis]") {
    CHECK_THROWS_AS(cosine_design(0, 2), DimensionError);
    CHECK_THROWS_AS(cosine_design(5, 0), DimensionError);
    CHECK_THROWS_AS(basis_matrix({0, BasisKind::cosine}, 5), DimensionError);
}

TEST_CASE("build_general_design examples", "[basis]") {
    SECTION("unit instruments reproduce the basis") {
        const Mat basis = Mat::Identity(3, 3);
        const auto d = build_general_design(Mat::Ones(1, 3), basis, Vec::Zero(3), Vec::Zero(1), 0.0);
        CHECK(d.eta[0].isApprox(basis.transpose()));
    }
    SECTION("exact centering gives zero responses") {
        Mat w(2, 3);
        w << 1, 1, 1, 2, 2, 2;
        const Vec y = Vec::Constant(3, 1.5);
        Vec delta(2);
        delta << 1.5, 3.0;
        const auto d = build_general_design(w, Mat::Ones(1, 3), y, delta, 0.0);
        CHECK(d.zk.cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("direct product") {
        Mat w(1, 2);
        w << 2, 3;
        const auto d = build_general_design(w, Mat::Ones(1, 2), Vec::Ones(2), Vec::Zero(1), 0.0);
        CHECK(d.eta[0](0, 0) == 2.0);
        CHECK(d.eta[0](1, 0) == 3.0);
        CHECK(d.zk(0, 0) == 2.0);
        CHECK(d.zk(0, 1) == 3.0);
    }
    SECTION("shape errors") {
        CHECK_THROWS_AS(build_general_design(Mat::Ones(1, 3), Mat::Ones(2, 4), Vec::Ones(3), Vec::Zero(1), 0.0),
                        DimensionError);
        CHECK_THROWS_AS(build_general_design(Mat::Ones(1, 3), Mat::Ones(2, 3), Vec::Ones(3), Vec::Zero(1), -1.0),
                        DimensionError);
    }
}

TEST_CASE("IvSample validation", "[basis]") {
    IvSample s;
    s.y1 = Vec::Ones(3);
    s.y2 = Vec::Ones(3);
    s.z = Mat::Ones(1, 3);
    CHECK_NOTHROW(s.validate());
    s.omega << 1, 2, 2, 1;
    CHECK_THROWS_AS(s.validate(), DimensionError);
    s.omega.setIdentity();
    s.y2 = Vec::Ones(2);
    CHECK_THROWS_AS(s.validate(), DimensionError);
}

TEST_CASE("rng streams are reproducible and distinct", "[rng]") {
    const RngStream a{42, 7};
    auto e1 = a.engine();
    auto e2 = RngStream{42, 7}.engine();
    for (int i = 0; i < 100; ++i) REQUIRE(e1() == e2());
    CHECK(a.substream({1, 2}) == a.substream({1, 2}));
    CHECK_FALSE(a.substream({1, 2}) == a.substream({2, 1}));
    CHECK_FALSE(a.substream(1) == RngStream{42, 8}.substream(1));
    auto f1 = a.substream(3).engine();
    auto f2 = a.substream(4).engine();
    int equal = 0;
    for (int i = 0; i < 100; ++i) equal += f1() == f2();
    CHECK(equal == 0);
}
