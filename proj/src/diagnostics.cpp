#include "ivboot/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ivboot/basis.hpp"
#include "ivboot/errors.hpp"
#include "ivboot/linalg.hpp"
#include "ivboot/parallel.hpp"
#include "ivboot/quasi_likelihood.hpp"
#include "ivboot/stats.hpp"

namespace ivboot {

// ---------------------------------------------------------------------------
// deviation function
// ---------------------------------------------------------------------------

void DeviationParams::validate() const {
    if (!(x >= 0.0)) throw DimensionError("DeviationParams: x must be nonnegative");
    if (x2.rows() != x2.cols() || x2.rows() == 0) throw DimensionError("DeviationParams: X^2 must be square");
    if (!x2.isApprox(x2.transpose(), 1e-12)) throw DimensionError("DeviationParams: X^2 must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(x2, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff())) {
        throw DimensionError("DeviationParams: X^2 must be positive semi-definite");
    }
    if (es.eigenvalues().maxCoeff() <= 0.0) throw DimensionError("DeviationParams: X^2 must be nonzero");
    if (!(g * g > 2.0 * x2.trace() / 3.0)) throw DimensionError("DeviationParams: need g^2 > 2 tr(X^2) / 3");
}

DeviationConstants deviation_constants(const Mat& x2, double g) {
    Eigen::SelfAdjointEigenSolver<Mat> es(x2, Eigen::EigenvaluesOnly);
    const Vec& ev = es.eigenvalues();
    DeviationConstants c;
    c.tr_x2 = ev.sum();
    c.tr_x4 = ev.squaredNorm();
    c.lambda_max = ev.maxCoeff();
    c.x_low = std::sqrt(2.0 * c.tr_x4) / (18.0 * c.lambda_max);
    const double zc2 = (9.0 * g * g / 4.0 - 1.5 * c.tr_x2) / c.lambda_max;
    c.z_c = std::sqrt(zc2);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) log_det += std::log(1.0 - 2.0 * ev(i) / (3.0 * c.lambda_max));
    c.x_c = 0.5 * (2.0 * zc2 / 3.0 + log_det);
    c.g_c = std::sqrt(g * g - 2.0 * c.tr_x2 / 3.0) / std::sqrt(c.lambda_max);
    return c;
}

double z_function(const DeviationParams& p) {
    p.validate();
    const auto c = deviation_constants(p.x2, p.g);
    if (p.x <= c.x_low) return c.tr_x2 + std::sqrt(8.0 * c.tr_x4 * p.x);
    if (p.x <= c.x_c) return c.tr_x2 + 6.0 * p.x * c.lambda_max;
    const double z = c.z_c + 2.0 * (p.x - c.x_c) / c.g_c;
    return z * z * c.lambda_max;
}

double default_deviation_g(const Mat& x2) { return 2.0 * std::sqrt(2.0 * x2.trace()); }

// ---------------------------------------------------------------------------
// matrix Bernstein
// ---------------------------------------------------------------------------

double bernstein_bound(double t, double sigma2, double r_bound, int p) {
    if (!(t >= 0.0) || !(sigma2 > 0.0) || !(r_bound >= 0.0) || p < 1) {
        throw DimensionError("bernstein_bound: need t >= 0, sigma2 > 0, R >= 0, p >= 1");
    }
    return 2.0 * p * std::exp(-t * t / (2.0 * sigma2 * (1.0 + r_bound * t / (3.0 * sigma2))));
}

std::vector<double> empirical_opnorm_tail(const MatrixSampler& summand, int n_summands,
                                          const std::vector<double>& t_grid, int reps, const RngStream& rng,
                                          int threads) {
    if (n_summands < 1 || reps < 1) throw DimensionError("empirical_opnorm_tail: need n >= 1 and reps >= 1");
    std::vector<double> norms(static_cast<std::size_t>(reps));
    parallel_for(norms.size(), [&](std::size_t r) {
        auto eng = rng.substream(r).engine();
        Mat sum = summand(eng, 0);
        for (int i = 1; i < n_summands; ++i) sum += summand(eng, i);
        Eigen::SelfAdjointEigenSolver<Mat> es(sum, Eigen::EigenvaluesOnly);
        norms[r] = es.eigenvalues().cwiseAbs().maxCoeff();
    }, threads);
    std::vector<double> tail;
    tail.reserve(t_grid.size());
    for (double t : t_grid) {
        const auto hits = std::count_if(norms.begin(), norms.end(), [t](double v) { return v >= t; });
        tail.push_back(static_cast<double>(hits) / reps);
    }
    return tail;
}

// ---------------------------------------------------------------------------
// Gaussian comparison / approximation
// ---------------------------------------------------------------------------

namespace {

std::vector<double> gaussian_norms(const Mat& sigma, int reps, RngEngine eng) {
    Eigen::LLT<Mat> llt(sigma);
    if (llt.info() != Eigen::Success) throw DimensionError("covariance must be positive definite");
    const Mat l = llt.matrixL();
    boost::random::normal_distribution<double> nd;
    std::vector<double> out(static_cast<std::size_t>(reps));
    Vec z(sigma.rows());
    for (auto& v : out) {
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = nd(eng);
        v = (l * z).norm();
    }
    std::sort(out.begin(), out.end());
    return out;
}

double ecdf_below(const std::vector<double>& sorted, double t) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const auto idx = static_cast<std::size_t>(std::clamp(p * (sorted.size() - 1), 0.0, sorted.size() - 1.0));
    return sorted[idx];
}

} // namespace

GaussCompareResult gauss_compare_distance(const Mat& sigma0, const Mat& sigma1, int reps, const RngStream& rng) {
    if (sigma0.rows() != sigma0.cols() || sigma1.rows() != sigma1.cols() || sigma0.rows() != sigma1.rows()) {
        throw DimensionError("gauss_compare_distance: covariances must be square and of equal size");
    }
    if (reps < 2) throw DimensionError("gauss_compare_distance: reps must be at least 2");
    const auto r0 = gaussian_norms(sigma0, reps, rng.substream(0).engine());
    const auto r1 = gaussian_norms(sigma1, reps, rng.substream(1).engine());

    std::vector<double> pooled(r0);
    pooled.insert(pooled.end(), r1.begin(), r1.end());
    std::sort(pooled.begin(), pooled.end());
    const double lo = quantile_sorted(pooled, 0.001);
    const double hi = quantile_sorted(pooled, 0.999);
    constexpr int grid = 512;
    GaussCompareResult res;
    for (int k = 0; k < grid; ++k) {
        const double t = lo + (hi - lo) * k / (grid - 1);
        res.empirical_kolmogorov = std::max(res.empirical_kolmogorov, std::abs(ecdf_below(r1, t) - ecdf_below(r0, t)));
    }

    const auto d = sigma0.rows();
    const Mat gap = Mat::Identity(d, d) - sigma0.llt().solve(sigma1);
    Eigen::JacobiSVD<Mat> svd(gap);
    const double op = svd.singularValues()(0);
    res.bound_factor = std::max(std::sqrt(sigma0.trace()), std::sqrt(sigma1.trace())) * op;
    return res;
}

std::vector<GarPoint> gar_scaling_check(SummandLaw law, int dim, const std::vector<int>& n_list, int reps,
                                        const RngStream& rng, int threads) {
    if (n_list.size() < 2 || !std::is_sorted(n_list.begin(), n_list.end())) {
        throw DimensionError("gar_scaling_check: need an increasing list of at least two sizes");
    }
    if (dim < 1 || reps < 1) throw DimensionError("gar_scaling_check: need dim >= 1 and reps >= 1");
    constexpr int chunk = 1000;
    const int n_chunks = (reps + chunk - 1) / chunk;

    std::vector<GarPoint> out;
    for (int n : n_list) {
        if (n < 1) throw DimensionError("gar_scaling_check: sizes must be positive");
        std::vector<double> r2(static_cast<std::size_t>(reps));
        parallel_for(static_cast<std::size_t>(n_chunks), [&](std::size_t c) {
            auto eng = rng.substream({static_cast<std::uint64_t>(n), c}).engine();
            boost::random::normal_distribution<double> nd;
            boost::random::uniform_real_distribution<double> ud(-std::sqrt(3.0), std::sqrt(3.0));
            const int begin = static_cast<int>(c) * chunk;
            const int end = std::min(reps, begin + chunk);
            Vec s(dim);
            for (int r = begin; r < end; ++r) {
                s.setZero();
                std::uint64_t bits = 0;
                int bits_left = 0;
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < dim; ++j) {
                        switch (law) {
                        case SummandLaw::gaussian: s(j) += nd(eng); break;
                        case SummandLaw::uniform_cube: s(j) += ud(eng); break;
                        case SummandLaw::rademacher_product:
                            if (bits_left == 0) {
                                bits = eng();
                                bits_left = 64;
                            }
                            s(j) += (bits & 1u) ? 1.0 : -1.0;
                            bits >>= 1;
                            --bits_left;
                            break;
                        }
                    }
                }
                r2[static_cast<std::size_t>(r)] = s.squaredNorm() / n;
            }
        }, threads);
        GarPoint p;
        p.n = n;
        p.distance = stats::ks_statistic(std::move(r2), [dim](double v) { return stats::chi2_cdf(v, dim); });
        p.dkw = stats::dkw_band(static_cast<std::size_t>(reps));
        out.push_back(p);
    }
    return out;
}

SummandLaw parse_summand_law(const std::string& name) {
    if (name == "gaussian") return SummandLaw::gaussian;
    if (name == "uniform_cube" || name == "uniform-cube") return SummandLaw::uniform_cube;
    if (name == "rademacher_product" || name == "rademacher-product") return SummandLaw::rademacher_product;
    throw ConfigError("unknown summand law '" + name + "'");
}

// ---------------------------------------------------------------------------
// finite-sample conditions
// ---------------------------------------------------------------------------

FscReport fsc_design_check(const GeneralDesign& design) {
    design.validate();
    FscReport rep;
    const Mat h = normal_matrix(design);
    const Mat d0_inv = linalg::inv_sqrt_spd(h);
    const int n = design.n_obs();
    for (int i = 0; i < n; ++i) {
        Vec row = Vec::Zero(design.dim());
        for (const auto& e : design.eta) row += e.row(i).transpose();
        rep.design_ratio = std::max(rep.design_ratio, (d0_inv * row).norm());
    }
    rep.design_ok = rep.design_ratio <= 0.5;

    const Vec theta = mle(design);
    Mat weighted = Mat::Zero(design.dim(), design.dim());
    for (int k = 0; k < design.n_moments(); ++k) {
        const auto& e = design.eta[static_cast<std::size_t>(k)];
        const double s2 = (design.zk.row(k).transpose() - e * theta).squaredNorm() / n;
        rep.residual_variances.push_back(s2);
        weighted.noalias() += (s2 - 1.0) * (e.transpose() * e);
    }
    rep.identifiability_value = linalg::lambda_max_sym(weighted);
    rep.identifiability_ok = rep.identifiability_value < design.penalty;

    Vec eps = Vec::Zero(n);
    for (int k = 0; k < design.n_moments(); ++k) {
        const Vec zrow = design.zk.row(k).transpose();
        eps += zrow.array().matrix() - Vec::Constant(n, zrow.mean());
    }
    const double sd = n > 1 ? std::sqrt(eps.squaredNorm() / (n - 1)) : 0.0;
    if (sd > 0.0) {
        const Vec std_eps = eps / sd;
        rep.max_standardized_residual = std_eps.cwiseAbs().maxCoeff();
        for (double lam : {0.25, 0.5, 1.0}) {
            rep.log_mgf.emplace_back(lam, std::log((lam * std_eps).array().exp().mean()));
        }
    }
    return rep;
}

GeneralDesign linear_iv_design(int n, const Vec& theta_star, double penalty, RngEngine& engine) {
    const auto dim = static_cast<int>(theta_star.size());
    if (n < 1 || dim < 1) throw DimensionError("linear_iv_design: need n >= 1 and a nonempty theta");
    boost::random::uniform_real_distribution<double> ud(0.0, 1.0);
    boost::random::normal_distribution<double> nd;
    Mat w(1, n);
    Mat psi(dim, n);
    Vec y(n);
    for (int i = 0; i < n; ++i) {
        const double x = ud(engine);
        for (int j = 0; j < dim; ++j) psi(j, i) = std::sqrt(2.0) * std::cos(std::numbers::pi * (j + 1) * x);
        w(0, i) = (engine() & 1u) ? 1.0 : -1.0;
        y(i) = psi.col(i).dot(theta_star) + nd(engine);
    }
    return build_general_design(w, psi, y, Vec::Zero(1), penalty);
}

nlohmann::json to_json(const FscReport& r) {
    nlohmann::json j;
    j["design"] = {{"ratio", r.design_ratio}, {"ok", r.design_ok}};
    j["identifiability"] = {{"lambda_max", r.identifiability_value},
                            {"ok", r.identifiability_ok},
                            {"residual_variances", r.residual_variances}};
    auto mgf = nlohmann::json::array();
    for (const auto& [lam, v] : r.log_mgf) mgf.push_back({{"lambda", lam}, {"log_mgf", v}});
    j["moments"] = {{"max_standardized_residual", r.max_standardized_residual}, {"log_mgf", mgf}};
    return j;
}

} // namespace ivboot
