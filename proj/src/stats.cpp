#include "ivboot/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "ivboot/errors.hpp"

namespace ivboot::stats {

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<>(), p); }

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<>(), x); }

double chi2_quantile(double p, double df) {
    return boost::math::quantile(boost::math::chi_squared_distribution<>(df), p);
}

double chi2_cdf(double x, double df) {
    if (x <= 0.0) return 0.0;
    return boost::math::cdf(boost::math::chi_squared_distribution<>(df), x);
}

double upper_quantile_inplace(std::span<double> values, double alpha) {
    if (values.empty()) throw DimensionError("upper_quantile: empty sample");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DimensionError("upper_quantile: alpha outside [0, 1]");
    const auto b = static_cast<double>(values.size());
    // guard the ceiling against representation error in (1 - alpha) * B
    auto pos = static_cast<std::ptrdiff_t>(std::ceil((1.0 - alpha) * b - 1e-9));
    pos = std::clamp<std::ptrdiff_t>(pos, 1, static_cast<std::ptrdiff_t>(values.size()));
    auto nth = values.begin() + (pos - 1);
    std::nth_element(values.begin(), nth, values.end());
    return *nth;
}

double upper_quantile(std::vector<double> values, double alpha) {
    return upper_quantile_inplace(std::span<double>(values), alpha);
}

double median(std::vector<double> values) {
    if (values.empty()) throw DimensionError("median: empty sample");
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + mid));
    }
    return m;
}

double mean(std::span<const double> values) {
    if (values.empty()) throw DimensionError("mean: empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
    if (values.size() < 2) throw DimensionError("variance: need at least two values");
    const double m = mean(values);
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return s / static_cast<double>(values.size() - 1);
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw DimensionError("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_pvalue(double d, std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double lambda = (rn + 0.12 + 0.11 / rn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double dkw_band(std::size_t n, double alpha) {
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DimensionError("loglog_slope: need two or more points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DimensionError("loglog_slope: values must be positive");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]) - mx;
        sxy += lx * (std::log(y[i]) - my);
        sxx += lx * lx;
    }
    if (sxx == 0.0) throw DimensionError("loglog_slope: x values must differ");
    return sxy / sxx;
}

} // namespace ivboot::stats
