#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "collneg/samples.hpp"

namespace collneg {

// Number of terms of the full quadratic expansion in b variables.
constexpr std::size_t quadratic_term_count(int b) {
    const auto n = static_cast<std::size_t>(b);
    return 1 + n + n * (n + 1) / 2;
}

// (1, x_1..x_b, x_1 x_1, x_1 x_2, .., x_1 x_b, x_2 x_2, .., x_b x_b).
std::vector<double> expand_quadratic(std::span<const double> x);
void expand_quadratic(std::span<const double> x, std::span<double> out);

// Negativity model N_p = theta . expand_quadratic(x).
class QuadraticModel {
public:
    QuadraticModel(int b, std::vector<double> theta);

    int b() const noexcept { return b_; }
    std::span<const double> theta() const noexcept { return theta_; }

    // Unclipped dot product; this is what the metrics see.
    double predict_raw(std::span<const double> x) const;
    // Clamped to [0, 1] for end users.
    double predict(std::span<const double> x) const;

private:
    int b_;
    std::vector<double> theta_;
};

// Ordinary least squares over the quadratic design matrix (column-pivoted
// Householder QR). Requires at least twice as many rows as terms; FitError
// on a rank-deficient design.
QuadraticModel fit_quadratic(const LabeledSet& train);

// Plain-text theta list. Accepts commas, whitespace, parentheses and '#'
// comments, so the published vectors can be stored as printed.
void save_quadratic(const QuadraticModel& model, const std::filesystem::path& path);
QuadraticModel load_quadratic(const std::filesystem::path& path);
QuadraticModel parse_quadratic(const std::string& text);

// Bundled reference theta vector for b in [5, 10].
QuadraticModel reference_quadratic(int b);
std::filesystem::path reference_dir();

}  // namespace collneg
