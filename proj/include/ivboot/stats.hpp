#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ivboot::stats {

double normal_quantile(double p);
double normal_cdf(double x);
double chi2_quantile(double p, double df);
double chi2_cdf(double x, double df);

// Right-continuous empirical (1 - alpha) quantile: the order statistic at
// 1-based position ceil((1 - alpha) * B), clamped to [1, B].
double upper_quantile(std::vector<double> values, double alpha);
// Same, but reorders `values` in place instead of copying.
double upper_quantile_inplace(std::span<double> values, double alpha);

double median(std::vector<double> values);
double mean(std::span<const double> values);
double variance(std::span<const double> values);

// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
// Asymptotic p-value of the KS statistic with the small-sample correction
// lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
double ks_pvalue(double d, std::size_t n);

// Half-width of the DKW confidence band at level 1 - alpha.
double dkw_band(std::size_t n, double alpha = 0.05);

double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace ivboot::stats
