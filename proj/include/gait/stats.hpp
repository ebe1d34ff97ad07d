#pragma once

// Order statistics and robust scale estimates shared by the filtering,
// outlier-removal and cycle modules.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gait/common.hpp"

namespace gait {

enum class QuantileMethod {
    linear,  // value at fractional rank p*(n-1), linearly interpolated
};

struct Quartiles {
    double q_low = 0.0;
    double median = 0.0;
    double q_up = 0.0;

    double iqr() const { return q_up - q_low; }
};

namespace detail {

inline double quantile_sorted(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double rank = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = rank - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

// Quantile at probability p of the (unsorted) samples. Missing entries are
// not allowed here; callers strip them first.
inline double quantile(std::vector<double> samples, double p,
                       QuantileMethod method = QuantileMethod::linear) {
    if (samples.empty()) fail(Errc::invalid_input, "quantile: empty sample set");
    (void)method;  // single method today; the enum pins the contract
    std::sort(samples.begin(), samples.end());
    return detail::quantile_sorted(samples, p);
}

inline Quartiles quartiles(std::vector<double> samples,
                           QuantileMethod method = QuantileMethod::linear) {
    if (samples.empty()) fail(Errc::invalid_input, "quartiles: empty sample set");
    (void)method;
    std::sort(samples.begin(), samples.end());
    return {detail::quantile_sorted(samples, 0.25), detail::quantile_sorted(samples, 0.50),
            detail::quantile_sorted(samples, 0.75)};
}

inline double median(std::vector<double> samples) { return quantile(std::move(samples), 0.5); }

// Median absolute deviation about the median.
inline double mad(const std::vector<double>& samples) {
    const double m = median(samples);
    std::vector<double> dev(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = std::abs(samples[i] - m);
    return median(std::move(dev));
}

inline double mean(std::span<const double> samples) {
    if (samples.empty()) fail(Errc::invalid_input, "mean: empty sample set");
    double s = 0.0;
    for (double v : samples) s += v;
    return s / static_cast<double>(samples.size());
}

// Sample (n-1) standard deviation; 0 for a single sample.
inline double sample_std(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n == 0) fail(Errc::invalid_input, "sample_std: empty sample set");
    if (n == 1) return 0.0;
    const double m = mean(samples);
    double ss = 0.0;
    for (double v : samples) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace gait
