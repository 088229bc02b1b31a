#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ivboot/benchmark_tests.hpp"
#include "ivboot/rng.hpp"
#include "ivboot/types.hpp"

namespace ivboot {

enum class ErrorKind { gauss, laplace, hetero_linear, hetero_periodic };

struct ErrorSpec {
    ErrorKind kind = ErrorKind::gauss;
    Mat2 omega = Mat2::Identity();
    // Scale b of Laplace(0, b) draws, variance 2 b^2.
    double laplace_scale = 1.0;

    void validate() const;
};

// How the concentration constant c maps onto pi' Z Z' pi.
//   per_n:             pi' Z Z' pi = c / n
//   design_normalized: pi' Z Z' pi = c n / 4, i.e. c / n measured with the
//                      design rescaled by 2 / n (cosine rows have energy n / 2)
enum class ConcentrationScale { per_n, design_normalized };

double concentration_target(double c, int n, ConcentrationScale scale);

struct SimConfig {
    int n = 200;
    int q = 5;
    double concentration = 4.0;
    ConcentrationScale scale = ConcentrationScale::design_normalized;
    double beta_star = 1.0;
    ErrorSpec error;
    // Hypothesized values beta0 tested at each grid point.
    std::vector<double> beta_grid;
    int reps = 1000;
    int boot_reps = 1000;
    double alpha = 0.05;
    std::uint64_t master_seed = 42;
    int clr_draws = 10000;
    int lr_null_reps = 10000;
    BlrCentering centering = BlrCentering::estimate;

    void validate() const;
};

// pi = s (1, 2, ..., J) with s > 0 chosen so that pi' Z Z' pi hits the target.
Vec gen_pi(const Mat& z, double concentration, ConcentrationScale scale = ConcentrationScale::per_n);

std::pair<Vec, Vec> gen_errors(const ErrorSpec& spec, int n, RngEngine& engine);
std::pair<Vec, Vec> gen_errors(const ErrorSpec& spec, int n, const RngStream& rng);

// Fixed part of a simulation: design, structural pi and their products.
struct SimDesign {
    Mat z;
    Vec pi;
    Vec mean;        // z' pi
    Mat g_inv_sqrt;  // (z z')^{-1/2}
};

SimDesign make_design(const SimConfig& config);

IvSample gen_sample(const SimConfig& config, double beta, const RngStream& rng);
IvSample gen_sample(const SimConfig& config, const SimDesign& design, double beta, RngEngine& engine);
// Same sample with all errors set to zero.
IvSample gen_noiseless_sample(const SimConfig& config, double beta);

ErrorKind parse_error_kind(const std::string& name);
std::string to_string(ErrorKind kind);
std::string to_string(ConcentrationScale scale);
ConcentrationScale parse_concentration_scale(const std::string& name);

// "start:step:end" inclusive of end up to rounding.
std::vector<double> parse_grid(const std::string& spec);

} // namespace ivboot
