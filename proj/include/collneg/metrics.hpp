#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace collneg {

// Residual statistics of predicted against exact negativity. With
// r_i = actual_i - predicted_i: mse = mean(r^2), mu = mean(r),
// tau = sqrt(mean((r - mu)^2)) and r2 = 1 - SS_res / SS_tot.
struct Metrics {
    double r2 = 0.0;
    double tau = 0.0;
    double mu = 0.0;
    double mse = 0.0;
    std::size_t n = 0;
};

// MetricsError on empty or mismatched inputs and on constant actuals.
Metrics compute_metrics(std::span<const double> actual, std::span<const double> predicted);

// One-line key=value record, e.g. "kind=reg b=7 n=50000 r2=... tau=... mu=... mse=...".
std::string format_metrics(const Metrics& m, const std::string& kind, int b);

}  // namespace collneg
