#include "collneg/measurement.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "collneg/error.hpp"

namespace collneg {

namespace {

// Bloch-vector sign patterns of the tetrahedron vertices.
constexpr std::array<std::array<int, 3>, 4> kTetrahedronSigns{{
    {+1, +1, +1},
    {+1, -1, -1},
    {-1, +1, -1},
    {-1, -1, +1},
}};

ComplexMatrix measurement_operator(const ComplexMatrix& px, const ComplexMatrix& middle,
                                   const ComplexMatrix& py) {
    return kron(kron(px, middle), py);
}

double checked_ratio(cplx numerator, cplx denominator, int x, int y) {
    if (denominator.real() < kDenominatorFloor) {
        throw MeasurementError(fmt::format(
            "collective_probability: vanishing denominator {:.3e} for configuration ({}, {})",
            denominator.real(), x, y));
    }
    return numerator.real() / denominator.real();
}

double evaluate(const FourQubitState& rho4, const ComplexMatrix& px, const ComplexMatrix& py, int x,
                int y) {
    const cplx num = trace_of_product(rho4.mat(), measurement_operator(px, bell_projector().mat, py));
    const cplx den =
        trace_of_product(rho4.mat(), measurement_operator(px, ComplexMatrix::identity(4), py));
    return checked_ratio(num, den, x, y);
}

}  // namespace

MeasurementConfig::MeasurementConfig(int x, int y) : x_(std::min(x, y)), y_(std::max(x, y)) {
    if (x_ < 1 || y_ > 4) {
        throw DimensionError(fmt::format("MeasurementConfig: indices ({}, {}) outside 1..4", x, y));
    }
}

const std::array<MeasurementConfig, kMaxConfigs>& feature_configs() {
    static const std::array<MeasurementConfig, kMaxConfigs> configs{
        MeasurementConfig{1, 1}, MeasurementConfig{2, 2}, MeasurementConfig{3, 3},
        MeasurementConfig{4, 4}, MeasurementConfig{1, 3}, MeasurementConfig{2, 4},
        MeasurementConfig{1, 4}, MeasurementConfig{1, 2}, MeasurementConfig{2, 3},
        MeasurementConfig{3, 4},
    };
    return configs;
}

std::array<LocalProjector, 4> tetrahedral_projectors() {
    const double k = 1.0 / std::sqrt(3.0);
    const ComplexMatrix s0 = pauli::sigma0();
    const ComplexMatrix sx = pauli::sigma_x();
    const ComplexMatrix sy = pauli::sigma_y();
    const ComplexMatrix sz = pauli::sigma_z();
    std::array<LocalProjector, 4> out;
    for (std::size_t j = 0; j < 4; ++j) {
        const auto& s = kTetrahedronSigns[j];
        ComplexMatrix bloch = sx * (s[0] * k) + sy * (s[1] * k) + sz * (s[2] * k);
        out[j] = LocalProjector{static_cast<int>(j) + 1, (s0 + bloch) * 0.25};
    }
    return out;
}

BellProjector bell_projector() { return BellProjector{DensityMatrix::pure(singlet_vector()).mat()}; }

double collective_probability(const FourQubitState& rho4, const ComplexMatrix& px,
                              const ComplexMatrix& py) {
    if (px.dim() != 2 || py.dim() != 2) {
        throw DimensionError("collective_probability: local operators must be 2x2");
    }
    return evaluate(rho4, px, py, 0, 0);
}

double collective_probability(const FourQubitState& rho4, MeasurementConfig cfg) {
    const auto proj = tetrahedral_projectors();
    return evaluate(rho4, proj[cfg.x() - 1].mat, proj[cfg.y() - 1].mat, cfg.x(), cfg.y());
}

void require_config_count(int b) {
    if (b < kMinConfigs || b > kMaxConfigs) {
        throw DimensionError(
            fmt::format("configuration count b = {} outside [{}, {}]", b, kMinConfigs, kMaxConfigs));
    }
}

FeatureVector::FeatureVector(int b, std::vector<double> values) : b_(b), values_(std::move(values)) {
    require_config_count(b);
    if (values_.size() != static_cast<std::size_t>(b)) {
        throw DimensionError(fmt::format("FeatureVector: {} values for b = {}", values_.size(), b));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DimensionError("FeatureVector: non-finite value");
    }
}

CollectiveMeasurement::CollectiveMeasurement() {
    const auto proj = tetrahedral_projectors();
    const auto bell = bell_projector().mat;
    const auto id4 = ComplexMatrix::identity(4);
    for (std::size_t k = 0; k < kMaxConfigs; ++k) {
        const auto cfg = feature_configs()[k];
        const auto& px = proj[cfg.x() - 1].mat;
        const auto& py = proj[cfg.y() - 1].mat;
        numerators_[k] = measurement_operator(px, bell, py);
        denominators_[k] = measurement_operator(px, id4, py);
    }
}

double CollectiveMeasurement::probability(const FourQubitState& rho4, int config_index) const {
    const auto k = static_cast<std::size_t>(config_index);
    const auto cfg = feature_configs().at(k);
    return checked_ratio(trace_of_product(rho4.mat(), numerators_[k]),
                         trace_of_product(rho4.mat(), denominators_[k]), cfg.x(), cfg.y());
}

std::array<double, kMaxConfigs> CollectiveMeasurement::all_probabilities(const DensityMatrix& rho) const {
    const FourQubitState rho4(rho);
    std::array<double, kMaxConfigs> out{};
    for (int k = 0; k < kMaxConfigs; ++k) out[static_cast<std::size_t>(k)] = probability(rho4, k);
    return out;
}

FeatureVector feature_vector(const DensityMatrix& rho, int b) {
    require_config_count(b);
    static const CollectiveMeasurement measurement;
    const auto all = measurement.all_probabilities(rho);
    return FeatureVector(b, std::vector<double>(all.begin(), all.begin() + b));
}

}  // namespace collneg
