#pragma once

// Test-only reference computations. Nothing here calls the library routine
// it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "collneg/linalg.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Dense = std::vector<std::vector<cplx>>;

inline Dense to_dense(const collneg::ComplexMatrix& m) {
    Dense d(m.dim(), std::vector<cplx>(m.dim()));
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) d[i][j] = m(i, j);
    return d;
}

inline Dense multiply(const Dense& a, const Dense& b) {
    const std::size_t n = a.size();
    Dense c(n, std::vector<cplx>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

// Characteristic polynomial coefficients c[0..n] of det(lambda I - A),
// c[n] = 1, by the Faddeev-LeVerrier recursion.
inline std::vector<cplx> characteristic_polynomial(const Dense& a) {
    const std::size_t n = a.size();
    std::vector<cplx> c(n + 1);
    c[n] = 1.0;
    Dense m(n, std::vector<cplx>(n));  // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A M_{k-1} + c_{n-k+1} I
        Dense next = multiply(a, m);
        for (std::size_t i = 0; i < n; ++i) next[i][i] += c[n - k + 1];
        m = std::move(next);
        const Dense am = multiply(a, m);
        cplx tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += am[i][i];
        c[n - k] = -tr / static_cast<double>(k);
    }
    return c;
}

// Roots of a monic polynomial by Durand-Kerner iteration followed by
// Newton polishing; returns real parts sorted ascending.
inline std::vector<double> real_roots(const std::vector<cplx>& c) {
    const std::size_t n = c.size() - 1;
    auto eval = [&](cplx z) {
        cplx v = c[n];
        for (std::size_t k = n; k-- > 0;) v = v * z + c[k];
        return v;
    };
    auto deriv = [&](cplx z) {
        cplx v = static_cast<double>(n) * c[n];
        for (std::size_t k = n - 1; k >= 1; --k) v = v * z + static_cast<double>(k) * c[k];
        return v;
    };
    double radius = 0.0;
    for (std::size_t k = 0; k < n; ++k) radius = std::max(radius, std::abs(c[k]));
    radius = 1.0 + radius;
    std::vector<cplx> z(n);
    const cplx seed(0.4, 0.9);
    for (std::size_t k = 0; k < n; ++k) z[k] = radius * std::pow(seed, static_cast<double>(k));
    for (int iter = 0; iter < 2000; ++iter) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx denom = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= z[i] - z[j];
            const cplx step = eval(z[i]) / denom;
            z[i] -= step;
            change = std::max(change, std::abs(step));
        }
        if (change < 1e-15) break;
    }
    for (auto& root : z) {
        for (int k = 0; k < 5; ++k) {
            const cplx d = deriv(root);
            if (std::abs(d) == 0.0) break;
            root -= eval(root) / d;
        }
    }
    std::vector<double> out;
    for (const auto& root : z) out.push_back(root.real());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<double> charpoly_eigenvalues(const collneg::ComplexMatrix& h) {
    return real_roots(characteristic_polynomial(to_dense(h)));
}

inline collneg::ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    collneg::ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = cplx(g(gen), g(gen));
    return m;
}

inline collneg::ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& gen) {
    const auto m = random_matrix(n, gen);
    collneg::ComplexMatrix h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return h;
}

// Ginibre-induced random density matrix G G^dagger / Tr(G G^dagger);
// independent of the sampler under test.
inline collneg::ComplexMatrix random_density(std::size_t n, std::mt19937_64& gen) {
    const auto g = random_matrix(n, gen);
    collneg::ComplexMatrix rho(n);
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += g(i, k) * std::conj(g(j, k));
            rho(i, j) = s;
        }
    for (std::size_t i = 0; i < n; ++i) tr += rho(i, i).real();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rho(i, j) /= tr;
    for (std::size_t i = 0; i < n; ++i) rho(i, i) = rho(i, i).real();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) rho(j, i) = std::conj(rho(i, j));
    return rho;
}

// Random single-qubit unitary from a normalised quaternion.
inline collneg::ComplexMatrix random_qubit_unitary(std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    std::array<double, 4> q{g(gen), g(gen), g(gen), g(gen)};
    double norm = 0.0;
    for (double v : q) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : q) v /= norm;
    const cplx a(q[0], q[1]);
    const cplx b(q[2], q[3]);
    return collneg::ComplexMatrix(2, {a, -std::conj(b), b, std::conj(a)});
}

// Werner negativity, closed form.
inline double werner_negativity(double p) { return std::max(0.0, (3.0 * p - 1.0) / 2.0); }

}  // namespace oracle
