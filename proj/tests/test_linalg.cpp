#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "collneg/error.hpp"
#include "collneg/linalg.hpp"
#include "collneg/measurement.hpp"
#include "oracles.hpp"

using namespace collneg;

namespace {

ComplexMatrix diag4(double a, double b, double c, double d) {
    const std::array<double, 4> v{a, b, c, d};
    return ComplexMatrix::diagonal(v);
}

ComplexMatrix werner_matrix(double p) {
    ComplexMatrix s(4);
    s(1, 1) = 0.5;
    s(2, 2) = 0.5;
    s(1, 2) = -0.5;
    s(2, 1) = -0.5;
    return s * p + ComplexMatrix::identity(4) * ((1.0 - p) / 4.0);
}

}  // namespace

TEST_CASE("matrix construction validates shape and finiteness") {
    CHECK_THROWS_AS(ComplexMatrix(2, {1.0, 2.0, 3.0}), DimensionError);
    CHECK_THROWS_AS(ComplexMatrix(1, {std::numeric_limits<double>::quiet_NaN()}), DimensionError);
    CHECK_THROWS_AS(ComplexMatrix(1, {cplx(0.0, std::numeric_limits<double>::infinity())}), DimensionError);
}

TEST_CASE("pauli algebra") {
    const auto sx = pauli::sigma_x();
    const auto sy = pauli::sigma_y();
    const auto sz = pauli::sigma_z();
    CHECK(max_abs_diff(matmul(sx, sx), pauli::sigma0()) == 0.0);
    CHECK(max_abs_diff(dagger(sy), sy) == 0.0);
    CHECK(std::abs(trace(sz)) == 0.0);
    // sigma_x sigma_y = i sigma_z
    CHECK(max_abs_diff(matmul(sx, sy), sz * cplx(0.0, 1.0)) < 1e-15);
}

TEST_CASE("matmul rejects mismatched dimensions") {
    CHECK_THROWS_AS(matmul(ComplexMatrix::identity(2), ComplexMatrix::identity(4)), DimensionError);
    CHECK_THROWS_AS(trace_of_product(ComplexMatrix::identity(2), ComplexMatrix::identity(4)), DimensionError);
}

TEST_CASE("kron") {
    CHECK(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)) == ComplexMatrix::identity(4));
    CHECK(max_abs_diff(kron(pauli::sigma_z(), pauli::sigma_z()), diag4(1, -1, -1, 1)) == 0.0);

    const auto proj = tetrahedral_projectors();
    const auto big = kron(kron(proj[0].mat, bell_projector().mat), proj[0].mat);
    CHECK(big.dim() == 16);

    SUBCASE("index layout") {
        std::mt19937_64 gen(3);
        const auto a = oracle::random_matrix(2, gen);
        const auto b = oracle::random_matrix(4, gen);
        const auto k = kron(a, b);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t r = 0; r < 4; ++r)
                    for (std::size_t s = 0; s < 4; ++s) CHECK(k(i * 4 + r, j * 4 + s) == a(i, j) * b(r, s));
    }

    SUBCASE("associative and trace-multiplicative") {
        std::mt19937_64 gen(11);
        for (int trial = 0; trial < 50; ++trial) {
            const auto a = oracle::random_matrix(2, gen);
            const auto b = oracle::random_matrix(2, gen);
            const auto c = oracle::random_matrix(4, gen);
            CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) < 1e-12);
            CHECK(std::abs(trace(kron(a, c)) - trace(a) * trace(c)) < 1e-12);
        }
    }
}

TEST_CASE("trace_of_product matches trace of matmul") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = oracle::random_matrix(16, gen);
        const auto b = oracle::random_matrix(16, gen);
        CHECK(std::abs(trace_of_product(a, b) - trace(matmul(a, b))) < 1e-10);
    }
}

TEST_CASE("partial transpose") {
    SUBCASE("diagonal matrices are fixed points") {
        const auto d = diag4(0.1, 0.2, 0.3, 0.4);
        CHECK(partial_transpose(d, Subsystem::A) == d);
        CHECK(partial_transpose(d, Subsystem::B) == d);
    }
    SUBCASE("involution, hermiticity and trace") {
        std::mt19937_64 gen(17);
        for (int trial = 0; trial < 100; ++trial) {
            const auto rho = oracle::random_density(4, gen);
            for (auto which : {Subsystem::A, Subsystem::B}) {
                const auto pt = partial_transpose(rho, which);
                CHECK(partial_transpose(pt, which) == rho);
                CHECK(hermiticity_defect(pt) < 1e-15);
                CHECK(std::abs(trace(pt) - trace(rho)) < 1e-15);
            }
            // PT_A then PT_B is the full transpose.
            CHECK(partial_transpose(partial_transpose(rho, Subsystem::A), Subsystem::B) == transpose(rho));
        }
    }
    SUBCASE("explicit entry mapping on qubit B") {
        std::mt19937_64 gen(19);
        const auto m = oracle::random_matrix(4, gen);
        const auto pt = partial_transpose(m, Subsystem::B);
        // <i a| PT |j b> = <i b| m |j a>
        CHECK(pt(0, 1) == m(1, 0));
        CHECK(pt(0, 3) == m(1, 2));
        CHECK(pt(2, 1) == m(3, 0));
        CHECK(pt(0, 2) == m(0, 2));
    }
    SUBCASE("singlet spectrum") {
        const auto ev = hermitian_eigenvalues(partial_transpose(werner_matrix(1.0), Subsystem::A));
        REQUIRE(ev.size() == 4);
        CHECK(ev[0] == doctest::Approx(-0.5).epsilon(1e-14));
        for (int k = 1; k < 4; ++k) CHECK(ev[k] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("rejects non two-qubit input") {
        CHECK_THROWS_AS(partial_transpose(ComplexMatrix::identity(2), Subsystem::A), DimensionError);
    }
    SUBCASE("both subsystems share a spectrum") {
        std::mt19937_64 gen(23);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto rho = oracle::random_density(4, gen);
            const auto a = hermitian_eigenvalues(partial_transpose(rho, Subsystem::A));
            const auto b = hermitian_eigenvalues(partial_transpose(rho, Subsystem::B));
            for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-10);
        }
    }
}

TEST_CASE("hermitian eigenvalues: closed forms") {
    const auto id = hermitian_eigenvalues(ComplexMatrix::identity(4));
    for (double v : id) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

    const auto z = hermitian_eigenvalues(pauli::sigma_z());
    CHECK(z[0] == -1.0);
    CHECK(z[1] == 1.0);

    // Werner p = 2/3: (1 - 3p)/4 = -1/4 once, (1 + p)/4 = 5/12 three times.
    const auto w = hermitian_eigenvalues(partial_transpose(werner_matrix(2.0 / 3.0), Subsystem::B));
    CHECK(std::abs(w[0] - (-0.25)) < 1e-12);
    for (int k = 1; k < 4; ++k) CHECK(std::abs(w[k] - 5.0 / 12.0) < 1e-12);

    // The same spectrum from the characteristic-polynomial oracle.
    const auto wo = oracle::charpoly_eigenvalues(partial_transpose(werner_matrix(2.0 / 3.0), Subsystem::B));
    CHECK(std::abs(wo[0] - (-0.25)) < 1e-9);
    // Triple root: polynomial root error scales like eps^(1/3).
    for (int k = 1; k < 4; ++k) CHECK(std::abs(wo[k] - 5.0 / 12.0) < 1e-4);
}

TEST_CASE("hermitian eigenvalues agree with the characteristic polynomial oracle") {
    std::mt19937_64 gen(29);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto h = oracle::random_hermitian(4, gen);
        const auto got = hermitian_eigenvalues(h);
        const auto ref = oracle::charpoly_eigenvalues(h);
        REQUIRE(std::is_sorted(got.begin(), got.end()));
        double sum = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            worst = std::max(worst, std::abs(got[k] - ref[k]));
            sum += got[k];
        }
        CHECK(std::abs(sum - trace(h).real()) < 1e-10);
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("eigenvector residuals on 16x16 inputs") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto h = oracle::random_hermitian(16, gen);
        const auto es = hermitian_eigensystem(h);
        double sum = 0.0;
        for (std::size_t k = 0; k < 16; ++k) {
            double residual = 0.0;
            for (std::size_t i = 0; i < 16; ++i) {
                cplx hv = 0.0;
                for (std::size_t j = 0; j < 16; ++j) hv += h(i, j) * es.vectors(j, k);
                residual += std::norm(hv - es.values[k] * es.vectors(i, k));
            }
            CHECK(std::sqrt(residual) < 1e-9);
            sum += es.values[k];
        }
        CHECK(std::abs(sum - trace(h).real()) < 1e-10);
    }
}

TEST_CASE("hermitian eigenvalues reject non-Hermitian input") {
    ComplexMatrix m = ComplexMatrix::identity(2);
    m(0, 1) = 1e-6;
    CHECK_THROWS_AS(hermitian_eigenvalues(m), NotHermitianError);
    // Defects under the tolerance are symmetrised away.
    m(0, 1) = 1e-12;
    CHECK_NOTHROW(hermitian_eigenvalues(m));
}
