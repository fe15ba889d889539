#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "collneg/linalg.hpp"
#include "collneg/states.hpp"

namespace collneg {

// One of the four tetrahedral POVM elements (sigma_0 + n.sigma / sqrt(3)) / 4.
struct LocalProjector {
    int index = 0;  // 1..4
    ComplexMatrix mat;
};

// Singlet projector |Psi-><Psi-|.
struct BellProjector {
    ComplexMatrix mat;
};

// Unordered pair of local projector indices, stored with x <= y.
class MeasurementConfig {
public:
    MeasurementConfig(int x, int y);

    int x() const noexcept { return x_; }
    int y() const noexcept { return y_; }

    friend bool operator==(const MeasurementConfig&, const MeasurementConfig&) = default;

private:
    int x_;
    int y_;
};

inline constexpr int kMinConfigs = 5;
inline constexpr int kMaxConfigs = 10;

// All ten configurations in feature order: 11, 22, 33, 44, 13, 24, 14, 12,
// 23, 34. The first b entries are the configuration set for b.
const std::array<MeasurementConfig, kMaxConfigs>& feature_configs();

std::array<LocalProjector, 4> tetrahedral_projectors();
BellProjector bell_projector();

inline constexpr double kDenominatorFloor = 1e-12;

// Tr[rho4 (px (x) Pi_Bell (x) py)] / Tr[rho4 (px (x) 1_4 (x) py)]. px and py
// are any 2x2 operators; scaling either leaves the ratio unchanged.
// MeasurementError when the denominator is below kDenominatorFloor.
double collective_probability(const FourQubitState& rho4, const ComplexMatrix& px,
                              const ComplexMatrix& py);
double collective_probability(const FourQubitState& rho4, MeasurementConfig cfg);

// Ordered measurement probabilities for b in [5, 10].
class FeatureVector {
public:
    FeatureVector(int b, std::vector<double> values);

    int b() const noexcept { return b_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
    int b_;
    std::vector<double> values_;
};

// Precomputes the twenty 16x16 measurement operators so that evaluating a
// state costs only trace products.
class CollectiveMeasurement {
public:
    CollectiveMeasurement();

    double probability(const FourQubitState& rho4, int config_index) const;

    // All ten probabilities in feature order.
    std::array<double, kMaxConfigs> all_probabilities(const DensityMatrix& rho) const;

private:
    std::array<ComplexMatrix, kMaxConfigs> numerators_;
    std::array<ComplexMatrix, kMaxConfigs> denominators_;
};

FeatureVector feature_vector(const DensityMatrix& rho, int b);

// DimensionError unless b is in [5, 10].
void require_config_count(int b);

}  // namespace collneg
