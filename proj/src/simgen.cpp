#include "ivboot/simgen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/random/laplace_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ivboot/basis.hpp"
#include "ivboot/errors.hpp"
#include "ivboot/linalg.hpp"

namespace ivboot {

void ErrorSpec::validate() const {
    if (!omega.isApprox(omega.transpose(), 1e-12)) throw ConfigError("ErrorSpec: omega must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat2> es(omega, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) throw ConfigError("ErrorSpec: omega must be positive definite");
    if (!(laplace_scale > 0.0)) throw ConfigError("ErrorSpec: laplace scale must be positive");
}

void SimConfig::validate() const {
    if (q < 1) throw ConfigError("SimConfig: q must be at least 1");
    if (n < q) throw ConfigError("SimConfig: n must be at least q");
    if (reps < 1) throw ConfigError("SimConfig: reps must be at least 1");
    if (boot_reps < 100) throw ConfigError("SimConfig: boot_reps must be at least 100");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("SimConfig: alpha must lie in (0, 1)");
    if (!(concentration > 0.0)) throw ConfigError("SimConfig: concentration must be positive");
    if (clr_draws < 1000) throw ConfigError("SimConfig: clr_draws must be at least 1000");
    if (lr_null_reps < 100) throw ConfigError("SimConfig: lr_null_reps must be at least 100");
    if (!std::isfinite(beta_star)) throw ConfigError("SimConfig: beta_star must be finite");
    for (double b : beta_grid) {
        if (!std::isfinite(b)) throw ConfigError("SimConfig: grid values must be finite");
    }
    error.validate();
}

double concentration_target(double c, int n, ConcentrationScale scale) {
    if (n < 1) throw DimensionError("concentration_target: n must be positive");
    switch (scale) {
    case ConcentrationScale::per_n: return c / n;
    case ConcentrationScale::design_normalized: return c * n / 4.0;
    }
    throw ConfigError("unknown concentration scale");
}

Vec gen_pi(const Mat& z, double concentration, ConcentrationScale scale) {
    if (!(concentration > 0.0)) throw ConfigError("gen_pi: concentration must be positive");
    const Mat g = z * z.transpose();
    if (linalg::numerical_rank(g, 1e-10) < g.rows()) throw SingularDesignError("gen_pi: Z Z' is singular");
    const auto j = z.rows();
    Vec pi = Vec::LinSpaced(j, 1.0, static_cast<double>(j));
    const double target = concentration_target(concentration, static_cast<int>(z.cols()), scale);
    pi *= std::sqrt(target / pi.dot(g * pi));
    return pi;
}

std::pair<Vec, Vec> gen_errors(const ErrorSpec& spec, int n, RngEngine& engine) {
    if (n < 1) throw DimensionError("gen_errors: n must be positive");
    const Mat2 chol = spec.omega.llt().matrixL();
    boost::random::normal_distribution<double> nd;
    boost::random::laplace_distribution<double> ld(0.0, spec.laplace_scale);
    Vec e1(n), e2(n);
    for (int i = 1; i <= n; ++i) {
        Vec2 raw;
        double sd = 1.0;
        switch (spec.kind) {
        case ErrorKind::gauss:
            raw << nd(engine), nd(engine);
            break;
        case ErrorKind::laplace:
            raw << ld(engine), ld(engine);
            break;
        case ErrorKind::hetero_linear:
            raw << nd(engine), nd(engine);
            sd = std::sqrt(5.0 * i / n);
            break;
        case ErrorKind::hetero_periodic:
            raw << nd(engine), nd(engine);
            sd = std::sqrt(2.0 + 1.5 * std::sin(6.0 * std::numbers::pi * i / n));
            break;
        }
        const Vec2 e = sd * (chol * raw);
        e1(i - 1) = e(0);
        e2(i - 1) = e(1);
    }
    return {std::move(e1), std::move(e2)};
}

std::pair<Vec, Vec> gen_errors(const ErrorSpec& spec, int n, const RngStream& rng) {
    auto eng = rng.engine();
    return gen_errors(spec, n, eng);
}

SimDesign make_design(const SimConfig& config) {
    config.validate();
    SimDesign d;
    d.z = cosine_design(config.n, config.q);
    d.pi = gen_pi(d.z, config.concentration, config.scale);
    d.mean = d.z.transpose() * d.pi;
    d.g_inv_sqrt = linalg::inv_sqrt_spd(d.z * d.z.transpose());
    return d;
}

IvSample gen_sample(const SimConfig& config, const SimDesign& design, double beta, RngEngine& engine) {
    auto [e1, e2] = gen_errors(config.error, config.n, engine);
    IvSample s;
    s.z = design.z;
    s.y2 = design.mean + e2;
    s.y1 = beta * design.mean + e1;
    s.omega = config.error.omega;
    s.truth = StructuralTruth{beta, design.pi};
    return s;
}

IvSample gen_sample(const SimConfig& config, double beta, const RngStream& rng) {
    const SimDesign design = make_design(config);
    auto eng = rng.engine();
    return gen_sample(config, design, beta, eng);
}

IvSample gen_noiseless_sample(const SimConfig& config, double beta) {
    const SimDesign design = make_design(config);
    IvSample s;
    s.z = design.z;
    s.y2 = design.mean;
    s.y1 = beta * design.mean;
    s.omega = config.error.omega;
    s.truth = StructuralTruth{beta, design.pi};
    return s;
}

ErrorKind parse_error_kind(const std::string& name) {
    if (name == "gauss") return ErrorKind::gauss;
    if (name == "laplace") return ErrorKind::laplace;
    if (name == "hetero-linear" || name == "hetero_linear") return ErrorKind::hetero_linear;
    if (name == "hetero-periodic" || name == "hetero_periodic") return ErrorKind::hetero_periodic;
    throw ConfigError("unknown error law '" + name + "'");
}

std::string to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::gauss: return "gauss";
    case ErrorKind::laplace: return "laplace";
    case ErrorKind::hetero_linear: return "hetero-linear";
    case ErrorKind::hetero_periodic: return "hetero-periodic";
    }
    return "?";
}

std::string to_string(ConcentrationScale scale) {
    return scale == ConcentrationScale::per_n ? "per-n" : "design-normalized";
}

ConcentrationScale parse_concentration_scale(const std::string& name) {
    if (name == "per-n" || name == "per_n") return ConcentrationScale::per_n;
    if (name == "design-normalized" || name == "design_normalized") return ConcentrationScale::design_normalized;
    throw ConfigError("unknown concentration scale '" + name + "'");
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw ConfigError("");
        } catch (const std::exception&) {
            throw ConfigError("grid must look like start:step:end, got '" + spec + "'");
        }
    }
    if (parts.size() != 3) throw ConfigError("grid must look like start:step:end, got '" + spec + "'");
    const double start = parts[0], step = parts[1], end = parts[2];
    if (!(step > 0.0) || end < start) throw ConfigError("grid needs a positive step and end >= start");
    const auto count = static_cast<long>(std::floor((end - start) / step + 1e-9)) + 1;
    if (count > 100000) throw ConfigError("grid has too many points");
    std::vector<double> grid;
    for (long k = 0; k < count; ++k) {
        // round away accumulated representation error at 12 digits
        grid.push_back(std::round((start + k * step) * 1e12) / 1e12);
    }
    return grid;
}

} // namespace ivboot
