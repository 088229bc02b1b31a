#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ivboot/benchmark_tests.hpp"
#include "ivboot/errors.hpp"
#include "ivboot/simgen.hpp"
#include "ivboot/stats.hpp"
#include "support.hpp"

using namespace ivboot;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

STPair pair_of(Vec s, Vec t) { return {std::move(s), std::move(t), 0.0}; }

Vec e(int j, int i) {
    Vec v = Vec::Zero(j);
    v(i) = 1.0;
    return v;
}

SimConfig small_config() {
    SimConfig c;
    c.n = 100;
    c.q = 3;
    c.concentration = 30.0;
    c.scale = ConcentrationScale::per_n;
    c.beta_star = 0.7;
    return c;
}

} // namespace

TEST_CASE("S and T vectors", "[benchmark]") {
    SimConfig c = small_config();
    const IvSample quiet = gen_noiseless_sample(c, c.beta_star);
    CHECK(st_vectors(quiet, c.beta_star).s.norm() < 1e-12);

    const IvSample s = gen_sample(c, c.beta_star, RngStream{41, 0});
    const auto st = st_vectors(s, 0.0);
    const Mat g = s.z * s.z.transpose();
    const Eigen::SelfAdjointEigenSolver<Mat> es(g);
    const Mat g_inv_sqrt = es.operatorInverseSqrt();
    CHECK((st.s - g_inv_sqrt * s.z * s.y1).norm() < 1e-10);
}

TEST_CASE("S is standard normal under the null", "[benchmark][mc]") {
    SimConfig c = small_config();
    c.error.omega << 1.0, 0.4, 0.4, 2.0;
    const auto design = make_design(c);
    Mat acc = Mat::Zero(3, 3);
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        auto eng = RngStream{42, 0}.substream(r).engine();
        IvSample s = gen_sample(c, design, c.beta_star, eng);
        const Vec sv = st_vectors(s, c.beta_star).s;
        acc += sv * sv.transpose();
    }
    acc /= reps;
    CHECK((acc - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("CLR statistic", "[benchmark]") {
    CHECK(t_clr(pair_of(Vec::Zero(3), e(3, 0))) == 0.0);
    CHECK_THAT(t_clr(2.0, 1.0, 0.0), WithinAbs(2.0, 1e-15));
    CHECK_THAT(t_clr(pair_of(e(3, 0), e(3, 0))), WithinAbs(2.0, 1e-15));
    auto eng = RngStream{43, 0}.engine();
    for (int r = 0; r < 100; ++r) {
        const Vec s = testing::gaussian_vector(4, eng);
        const Vec t = testing::gaussian_vector(4, eng);
        const auto p = pair_of(s, t);
        const double a = p.ss() - p.tt();
        // larger root of x^2 - a x - st^2 by the numerically stable formula
        const double disc = std::sqrt(a * a + 4.0 * p.st() * p.st());
        const double root = a >= 0 ? (a + disc) / 2.0 : -2.0 * p.st() * p.st() / (a - disc);
        CHECK_THAT(t_clr(p), WithinAbs(2.0 * root, 1e-10 * (1.0 + std::abs(root))));
    }
}

TEST_CASE("LM and AR statistics", "[benchmark]") {
    CHECK(t_lm(pair_of(e(3, 0), e(3, 1))) == 0.0);
    CHECK(t_ar(pair_of(Vec::Zero(3), e(3, 1)), 3) == 0.0);
    CHECK_THAT(t_ar(pair_of(Vec::Constant(4, 1.0), e(4, 1)), 4), WithinAbs(1.0, 1e-15));
    CHECK_THROWS_AS(t_lm(pair_of(e(3, 0), Vec::Zero(3))), DimensionError);
    auto eng = RngStream{44, 0}.engine();
    const Vec s = testing::gaussian_vector(5, eng);
    const Eigen::HouseholderQR<Mat> qr(testing::gaussian_matrix(5, 5, eng));
    const Mat q = qr.householderQ();
    CHECK_THAT(t_ar(pair_of(q * s, e(5, 0)), 5), WithinAbs(t_ar(pair_of(s, e(5, 0)), 5), 1e-12));
    CHECK_THAT(lm_critical(0.05), WithinAbs(3.841459, 1e-5));
    CHECK_THAT(ar_critical(5, 0.05), WithinAbs(11.070498 / 5.0, 1e-5));
}

TEST_CASE("CLR conditional critical values", "[benchmark]") {
    const RngStream rng{45, 0};
    const double chi1 = 2.0 * stats::chi2_quantile(0.95, 1);
    const double chi5 = 2.0 * stats::chi2_quantile(0.95, 5);
    CHECK_THAT(chi1, WithinAbs(7.6829, 1e-3));
    CHECK_THAT(chi5, WithinAbs(22.141, 1e-3));
    CHECK_THAT(clr_critical(1e6, 5, 0.05, 100000, rng), WithinRel(chi1, 0.05));
    CHECK_THAT(clr_critical(0.0, 5, 0.05, 100000, rng), WithinRel(chi5, 0.05));
    CHECK(clr_critical(3.0, 5, 1.0, 1000, rng) >= 0.0);
    const ClrCriticalTable table(5, 10000, rng);
    double min_stat = 1e300;
    for (double tau : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0, 1000.0}) {
        const double c = table.critical(tau, 0.05);
        CHECK(c <= min_stat + 1e-12);
        min_stat = c;
    }
    CHECK_THROWS_AS(clr_critical(-1.0, 5, 0.05, 1000, rng), DimensionError);
    CHECK_THROWS_AS(clr_critical(1.0, 5, 0.05, 10, rng), ConfigError);
}

TEST_CASE("profile likelihood", "[benchmark]") {
    SimConfig c = small_config();
    SECTION("noiseless recovery") {
        const IvSample s = gen_noiseless_sample(c, c.beta_star);
        const auto p = ams_profile_loglik(s, c.beta_star);
        CHECK_THAT(p.value, WithinAbs(-s.n() * std::log(4.0 * std::numbers::pi * std::numbers::pi), 1e-8));
        CHECK((p.pi_hat - s.truth->pi_star).norm() < 1e-10 * (1.0 + s.truth->pi_star.norm()));
    }
    SECTION("zero weights") {
        const IvSample s = gen_sample(c, c.beta_star, RngStream{46, 0});
        const auto p = ams_profile_loglik(s, 0.3, Vec::Zero(s.n()));
        CHECK(p.value == 0.0);
        CHECK(p.pi_hat.norm() == 0.0);
    }
    SECTION("likelihood ratio equals the CLR statistic") {
        for (int r = 0; r < 20; ++r) {
            c.concentration = 2.0 + r;
            const IvSample s = gen_sample(c, c.beta_star, RngStream{47, 0}.substream(r));
            const double b_hat = ams_profile_argmax(s);
            for (double beta0 : {-1.0, 0.0, 0.5, 2.0}) {
                // profile values are on the doubled log-likelihood scale
                const double lr =
                    2.0 * (ams_profile_loglik(s, b_hat).value - ams_profile_loglik(s, beta0).value);
                CHECK_THAT(lr, WithinAbs(t_clr(st_vectors(s, beta0)), 1e-6));
            }
        }
    }
    SECTION("unimodal on a grid") {
        c.error.omega.setIdentity();
        for (int r = 0; r < 100; ++r) {
            const IvSample s = gen_sample(c, c.beta_star, RngStream{48, 0}.substream(r));
            std::vector<double> v;
            for (int k = 0; k <= 400; ++k) v.push_back(ams_profile_loglik(s, -10.0 + 0.05 * k).value);
            int local_max = 0;
            for (std::size_t k = 1; k + 1 < v.size(); ++k) local_max += v[k] > v[k - 1] + 1e-9 && v[k] > v[k + 1] + 1e-9;
            CHECK(local_max <= 1);
        }
    }
}

TEST_CASE("bootstrap CLR statistic", "[benchmark]") {
    SimConfig c = small_config();
    const IvSample s = gen_sample(c, c.beta_star, RngStream{49, 0});
    CHECK(std::abs(ams_blr_statistic(s, 0.0, Vec::Ones(s.n()))) < 1e-8);
    const AmsBootstrap boot(s, 0.0);
    CHECK(std::abs(boot.statistic(Vec::Ones(s.n()))) < 1e-8);
    for (int r = 0; r < 30; ++r) {
        auto eng = RngStream{49, 1}.substream(r).engine();
        const Vec u = Vec::Ones(s.n()) + testing::gaussian_vector(s.n(), eng);
        try {
            const double ref = ams_blr_statistic(s, 0.0, u);
            CHECK(ref >= -1e-8);
            // closed-form sup agrees with the scan-and-refine reference
            CHECK_THAT(boot.statistic(u), WithinAbs(ref, 1e-6 * (1.0 + ref)));
        } catch (const IndefiniteWeightsError&) {
        }
    }
    const auto run = boot.run(200, 0.05, RngStream{49, 2});
    CHECK(run.t_blr_samples.size() == 200u);
    const auto again = boot.run(200, 0.05, RngStream{49, 2});
    CHECK(again.z_star_alpha == run.z_star_alpha);
    const auto out = boot.decide(100.0, run);
    CHECK(out.name == "BLR");
    CHECK(out.critical_value == 3.0 + run.z_star_alpha * std::sqrt(3.0));
}
