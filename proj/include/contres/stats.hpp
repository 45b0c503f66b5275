#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace contres {

// Quantile by linear interpolation on the sorted sample; q in [0, 1].
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile level out of range");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

// Wilson score interval for a binomial fraction at z standard normal
// units (z = 1.96 for 95%).
inline WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials,
                                      double z = 1.96) {
    if (trials <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = phat + z2 / (2.0 * n);
    const double margin = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    return {(center - margin) / denom, (center + margin) / denom};
}

} // namespace contres
