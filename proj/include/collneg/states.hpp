#pragma once

#include <array>

#include "collneg/linalg.hpp"
#include "collneg/rng.hpp"

namespace collneg {

// Two-qubit density matrix: 4x4, Hermitian, unit trace, positive
// semidefinite (each to 1e-10). Construction validates; the value is
// immutable afterwards.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix mat);

    const ComplexMatrix& mat() const noexcept { return mat_; }

    static DensityMatrix maximally_mixed();
    // p |Psi-><Psi-| + (1 - p) I/4, p in [0, 1].
    static DensityMatrix werner(double p);
    // |psi><psi| for a normalised 4-component state vector.
    static DensityMatrix pure(const std::array<cplx, 4>& psi);

private:
    ComplexMatrix mat_;
};

inline constexpr double kStateTolerance = 1e-10;

// Singlet (|01> - |10>)/sqrt(2) in the computational basis.
std::array<cplx, 4> singlet_vector();

// Uniform draws r_1..r_4 for the diagonal spectrum.
struct SpectrumParams {
    std::array<double, 4> r{};
};

// Parameters of one embedded 2x2 block U_j.
struct BlockParams {
    double xi = 0.0;     // in [0, 1]; phi = arcsin(sqrt(xi))
    double alpha = 0.0;  // angles in [0, 2 pi)
    double psi = 0.0;
    double chi = 0.0;
};

struct UnitaryParams {
    std::array<BlockParams, 6> blocks{};
};

// Diagonal entries of the sampled spectrum. The last entry closes the trace
// to one; r[3] is not used.
std::array<double, 4> spectrum_from(const SpectrumParams& params);

// U_j = e^{i alpha} [[e^{i psi} cos phi, e^{i chi} sin phi],
//                    [-e^{-i chi} sin phi, e^{-i psi} cos phi]].
ComplexMatrix block_unitary(const BlockParams& block);

// Ordered product of the six embedded blocks. Factors 1, 4, 6 act on basis
// rows/cols {3,4}, factors 2, 5 on {2,3}, factor 3 on {1,2} (1-based).
ComplexMatrix unitary_from(const UnitaryParams& params);

// Each draw consumes a fixed number of uniforms: 4 for the spectrum and
// 6 x (xi, alpha, psi, chi) for the unitary.
SpectrumParams draw_spectrum_params(Rng& rng);
UnitaryParams draw_unitary_params(Rng& rng);

ComplexMatrix sample_spectrum(Rng& rng);
ComplexMatrix sample_unitary(Rng& rng);

// rho = U diag(spectrum) U^dagger with spectrum drawn first, then U.
DensityMatrix random_state(Rng& rng);

// max(0, -2 * smallest eigenvalue of the partial transpose).
double negativity(const DensityMatrix& rho);

// Two-copy 16x16 state rho (x) SWAP rho SWAP^dagger. Qubit order is
// (copy 1 qubit 1, copy 1 qubit 2, copy 2 qubit 2, copy 2 qubit 1), so
// the middle pair is the one sent to the Bell projection.
class FourQubitState {
public:
    explicit FourQubitState(const DensityMatrix& rho);

    const ComplexMatrix& mat() const noexcept { return mat_; }

private:
    ComplexMatrix mat_;
};

inline FourQubitState build_rho4(const DensityMatrix& rho) { return FourQubitState(rho); }

}  // namespace collneg
