#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace collneg {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major. Sized for the 2x2 / 4x4 / 16x16
// operators of two-copy two-qubit systems; nothing here is tuned for more.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    // Zero matrix of the given dimension.
    explicit ComplexMatrix(std::size_t dim);

    // Row-major entries; throws DimensionError unless entries.size() == dim^2
    // and every entry is finite.
    ComplexMatrix(std::size_t dim, std::vector<cplx> entries);
    ComplexMatrix(std::size_t dim, std::initializer_list<cplx> entries);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(std::span<const double> diag);

    std::size_t dim() const noexcept { return dim_; }

    cplx& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * dim_ + col]; }
    const cplx& operator()(std::size_t row, std::size_t col) const noexcept {
        return data_[row * dim_ + col];
    }

    std::span<const cplx> entries() const noexcept { return data_; }

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx scale) noexcept;

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<cplx> data_;
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix dagger(const ComplexMatrix& a);
ComplexMatrix transpose(const ComplexMatrix& a);
cplx trace(const ComplexMatrix& a) noexcept;

// Tr(a * b) without forming the product.
cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

// (a ⊗ b)[(i*n + k), (j*n + l)] = a[i,j] * b[k,l], n = dim(b).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Largest entrywise modulus of a - b.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Largest entrywise modulus of h - h^dagger.
double hermiticity_defect(const ComplexMatrix& h) noexcept;

enum class Subsystem { A, B };

// Transposes the indices of one qubit of a 4x4 two-qubit operator.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, Subsystem which);

inline constexpr double kHermitianTolerance = 1e-10;

struct Eigensystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column k pairs with values[k]
};

// Cyclic complex Jacobi. Inputs must be Hermitian to kHermitianTolerance
// (NotHermitianError otherwise) and are symmetrised before rotating.
Eigensystem hermitian_eigensystem(const ComplexMatrix& h);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);

namespace pauli {
ComplexMatrix sigma0();
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();
}  // namespace pauli

// Two-qubit exchange operator.
ComplexMatrix swap_gate();

}  // namespace collneg
