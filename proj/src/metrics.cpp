#include "collneg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "collneg/error.hpp"

namespace collneg {

Metrics compute_metrics(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw MetricsError(fmt::format("metrics: {} actual values vs {} predictions", actual.size(),
                                       predicted.size()));
    }
    if (actual.empty()) throw MetricsError("metrics: empty input");

    const auto n = static_cast<double>(actual.size());
    double mean_actual = 0.0;
    double mean_residual = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        mean_actual += actual[i];
        mean_residual += actual[i] - predicted[i];
    }
    mean_actual /= n;
    mean_residual /= n;

    double ss_tot = 0.0;
    double ss_res = 0.0;
    double spread = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double r = actual[i] - predicted[i];
        ss_res += r * r;
        ss_tot += (actual[i] - mean_actual) * (actual[i] - mean_actual);
        spread += (r - mean_residual) * (r - mean_residual);
    }
    // Rounding in the mean can leave ss_tot slightly positive for equal values.
    const auto [lo, hi] = std::minmax_element(actual.begin(), actual.end());
    if (ss_tot == 0.0 || *lo == *hi) throw MetricsError("metrics: actual values are constant (SS_tot = 0)");

    Metrics m;
    m.n = actual.size();
    m.r2 = 1.0 - ss_res / ss_tot;
    m.mu = mean_residual;
    m.tau = std::sqrt(spread / n);
    m.mse = ss_res / n;
    return m;
}

std::string format_metrics(const Metrics& m, const std::string& kind, int b) {
    return fmt::format("kind={} b={} n={} r2={:.17g} tau={:.17g} mu={:.17g} mse={:.17g}", kind, b, m.n,
                       m.r2, m.tau, m.mu, m.mse);
}

}  // namespace collneg
