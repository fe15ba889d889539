#include "collneg/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "collneg/error.hpp"

namespace collneg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ComplexMatrix embed_block(const ComplexMatrix& block, std::size_t offset) {
    ComplexMatrix m = ComplexMatrix::identity(4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(offset + i, offset + j) = block(i, j);
    return m;
}

// 0-based offset of the 2x2 block in each of the six factors.
constexpr std::array<std::size_t, 6> kBlockOffsets{2, 1, 0, 2, 1, 2};

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix mat) : mat_(std::move(mat)) {
    if (mat_.dim() != 4) {
        throw InvalidStateError(fmt::format("DensityMatrix: expected 4x4, got {}x{}", mat_.dim(), mat_.dim()));
    }
    const double defect = hermiticity_defect(mat_);
    if (defect > kStateTolerance) {
        throw InvalidStateError(fmt::format("DensityMatrix: not Hermitian (defect {:.3e})", defect));
    }
    const cplx tr = trace(mat_);
    if (std::abs(tr - 1.0) > kStateTolerance) {
        throw InvalidStateError(fmt::format("DensityMatrix: trace {:.17g} != 1", tr.real()));
    }
    const double lowest = hermitian_eigenvalues(mat_).front();
    if (lowest < -kStateTolerance) {
        throw InvalidStateError(fmt::format("DensityMatrix: negative eigenvalue {:.3e}", lowest));
    }
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(ComplexMatrix::identity(4) * 0.25); }

DensityMatrix DensityMatrix::werner(double p) {
    const auto singlet = DensityMatrix::pure(singlet_vector());
    return DensityMatrix(singlet.mat() * p + ComplexMatrix::identity(4) * ((1.0 - p) / 4.0));
}

DensityMatrix DensityMatrix::pure(const std::array<cplx, 4>& psi) {
    ComplexMatrix m(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = psi[i] * std::conj(psi[j]);
    return DensityMatrix(std::move(m));
}

std::array<cplx, 4> singlet_vector() {
    const double h = 1.0 / std::numbers::sqrt2;
    return {0.0, h, -h, 0.0};
}

std::array<double, 4> spectrum_from(const SpectrumParams& params) {
    const auto& r = params.r;
    std::array<double, 4> d{};
    d[0] = r[0];
    d[1] = r[1] * (1.0 - d[0]);
    d[2] = r[2] * (1.0 - d[0] - d[1]);
    d[3] = std::max(0.0, 1.0 - d[0] - d[1] - d[2]);
    return d;
}

ComplexMatrix block_unitary(const BlockParams& b) {
    const double phi = std::asin(std::sqrt(b.xi));
    const cplx global = std::polar(1.0, b.alpha);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return ComplexMatrix(2, {global * std::polar(c, b.psi), global * std::polar(s, b.chi),
                             -global * std::polar(s, -b.chi), global * std::polar(c, -b.psi)});
}

ComplexMatrix unitary_from(const UnitaryParams& params) {
    ComplexMatrix u = ComplexMatrix::identity(4);
    for (std::size_t j = 0; j < params.blocks.size(); ++j) {
        u = matmul(u, embed_block(block_unitary(params.blocks[j]), kBlockOffsets[j]));
    }
    return u;
}

SpectrumParams draw_spectrum_params(Rng& rng) {
    SpectrumParams p;
    for (auto& r : p.r) r = rng.uniform();
    return p;
}

UnitaryParams draw_unitary_params(Rng& rng) {
    UnitaryParams p;
    for (auto& b : p.blocks) {
        b.xi = rng.uniform();
        b.alpha = kTwoPi * rng.uniform();
        b.psi = kTwoPi * rng.uniform();
        b.chi = kTwoPi * rng.uniform();
    }
    return p;
}

ComplexMatrix sample_spectrum(Rng& rng) {
    const auto d = spectrum_from(draw_spectrum_params(rng));
    return ComplexMatrix::diagonal(d);
}

ComplexMatrix sample_unitary(Rng& rng) { return unitary_from(draw_unitary_params(rng)); }

DensityMatrix random_state(Rng& rng) {
    const ComplexMatrix diag = sample_spectrum(rng);
    const ComplexMatrix u = sample_unitary(rng);
    return DensityMatrix(matmul(matmul(u, diag), dagger(u)));
}

double negativity(const DensityMatrix& rho) {
    const double lowest = hermitian_eigenvalues(partial_transpose(rho.mat(), Subsystem::B)).front();
    return std::max(0.0, -2.0 * lowest);
}

FourQubitState::FourQubitState(const DensityMatrix& rho) {
    const ComplexMatrix sw = swap_gate();
    mat_ = kron(rho.mat(), matmul(matmul(sw, rho.mat()), dagger(sw)));
}

}  // namespace collneg
