#include "collneg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "collneg/error.hpp"

namespace collneg {

namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.dim() != b.dim()) {
        throw DimensionError(fmt::format("{}: dimension mismatch ({} vs {})", op, a.dim(), b.dim()));
    }
}

constexpr double kJacobiThreshold = 1e-13;
constexpr int kJacobiMaxSweeps = 100;

double off_diagonal_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            if (i != j) sum += std::norm(a(i, j));
        }
    }
    return std::sqrt(sum);
}

double frobenius_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (const auto& z : a.entries()) sum += std::norm(z);
    return std::sqrt(sum);
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<cplx> entries)
    : dim_(dim), data_(std::move(entries)) {
    if (data_.size() != dim_ * dim_) {
        throw DimensionError(
            fmt::format("ComplexMatrix: {} entries for dimension {}", data_.size(), dim_));
    }
    for (const auto& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw DimensionError("ComplexMatrix: non-finite entry");
        }
    }
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<cplx> entries)
    : ComplexMatrix(dim, std::vector<cplx>(entries)) {}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_dim(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_dim(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scale) noexcept {
    for (auto& z : data_) z *= scale;
    return *this;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "matmul");
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(j, i) = std::conj(a(i, j));
    return out;
}

ComplexMatrix transpose(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(j, i) = a(i, j);
    return out;
}

cplx trace(const ComplexMatrix& a) noexcept {
    cplx t{};
    for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
    return t;
}

cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "trace_of_product");
    const std::size_t n = a.dim();
    cplx t{};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t += a(i, j) * b(j, i);
    return t;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t m = a.dim();
    const std::size_t n = b.dim();
    ComplexMatrix out(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) out(i * n + k, j * n + l) = aij * b(k, l);
        }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
    return worst;
}

double hermiticity_defect(const ComplexMatrix& h) noexcept {
    double worst = 0.0;
    for (std::size_t i = 0; i < h.dim(); ++i)
        for (std::size_t j = i; j < h.dim(); ++j)
            worst = std::max(worst, std::abs(h(i, j) - std::conj(h(j, i))));
    return worst;
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, Subsystem which) {
    if (rho.dim() != 4) {
        throw DimensionError(
            fmt::format("partial_transpose: expected a 4x4 two-qubit operator, got {}x{}", rho.dim(),
                        rho.dim()));
    }
    // Row index (i a), column index (j b); i,j on qubit A and a,b on qubit B.
    ComplexMatrix out(4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t b = 0; b < 2; ++b) {
                    const std::size_t row = 2 * i + a;
                    const std::size_t col = 2 * j + b;
                    out(row, col) = which == Subsystem::A ? rho(2 * j + a, 2 * i + b)
                                                          : rho(2 * i + b, 2 * j + a);
                }
    return out;
}

Eigensystem hermitian_eigensystem(const ComplexMatrix& h) {
    const double defect = hermiticity_defect(h);
    if (defect > kHermitianTolerance) {
        throw NotHermitianError(
            fmt::format("hermitian_eigensystem: max |h - h^dagger| = {:.3e} exceeds {:.0e}", defect,
                        kHermitianTolerance));
    }
    const std::size_t n = h.dim();
    ComplexMatrix a = h;
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (h(i, j) + std::conj(h(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double threshold = kJacobiThreshold * std::max(1.0, frobenius_norm(a));
    int sweep = 0;
    while (off_diagonal_norm(a) > threshold) {
        if (++sweep > kJacobiMaxSweeps) {
            throw ConvergenceError(fmt::format(
                "hermitian_eigensystem: no convergence after {} sweeps", kJacobiMaxSweeps));
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx g = a(p, q);
                const double mag = std::abs(g);
                if (mag == 0.0) continue;
                // Phase-rotate the (p,q) block to a real symmetric one, then
                // apply the classical real Jacobi rotation.
                const cplx phase = g / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double zeta = (aqq - app) / (2.0 * mag);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = t * c;
                // Rotation restricted to (p,q): [[c, s], [-s*conj(phase), c*conj(phase)]].
                const cplx vpp = c;
                const cplx vpq = s;
                const cplx vqp = -s * std::conj(phase);
                const cplx vqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * vpp + akq * vqp;
                    a(k, q) = akp * vpq + akq * vqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = std::conj(vpp) * apk + std::conj(vqp) * aqk;
                    a(q, k) = std::conj(vpq) * apk + std::conj(vqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = app - t * mag;
                a(q, q) = aqq + t * mag;

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * vpp + vkq * vqp;
                    v(k, q) = vkp * vpq + vkq * vqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return a(l, l).real() < a(r, r).real(); });

    Eigensystem out{std::vector<double>(n), ComplexMatrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t row = 0; row < n; ++row) out.vectors(row, k) = v(row, order[k]);
    }
    return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
    return hermitian_eigensystem(h).values;
}

namespace pauli {
ComplexMatrix sigma0() { return ComplexMatrix::identity(2); }
ComplexMatrix sigma_x() { return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix sigma_y() { return ComplexMatrix(2, {0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0}); }
ComplexMatrix sigma_z() { return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}); }
}  // namespace pauli

ComplexMatrix swap_gate() {
    return ComplexMatrix(4, {1.0, 0.0, 0.0, 0.0,  //
                             0.0, 0.0, 1.0, 0.0,  //
                             0.0, 1.0, 0.0, 0.0,  //
                             0.0, 0.0, 0.0, 1.0});
}

}  // namespace collneg
