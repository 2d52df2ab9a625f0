#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <hmgibbs/potentials.hpp>
#include <hmgibbs/projective.hpp>
#include <hmgibbs/symbolic.hpp>
#include <oracle.hpp>

namespace hmg::testing {

using Matrix = std::vector<std::vector<double>>;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(0x9e3779b97f4a7c15ULL ^ seed); }

/// Uniform table entries in [lo, hi].
inline LocallyConstantPotential random_potential(AlphabetPtr A, std::size_t r, std::uint64_t seed,
                                                 double lo = -1.0, double hi = 1.0) {
    auto g = rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::size_t n = 1;
    for (std::size_t i = 0; i <= r; ++i) n *= A->size();
    std::vector<double> t(n);
    for (auto& x : t) x = u(g);
    return LocallyConstantPotential(std::move(A), r, std::move(t));
}

/// r = 1 potential with table(a b) = log Q(a, b).
inline LocallyConstantPotential chain_potential(AlphabetPtr A, const Matrix& Q) {
    const std::size_t k = A->size();
    std::vector<double> t(k * k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) t[a * k + b] = std::log(Q[a][b]);
    return LocallyConstantPotential(std::move(A), 1, std::move(t));
}

inline Matrix random_stochastic(std::size_t k, std::uint64_t seed) {
    auto g = rng(seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Matrix Q(k, std::vector<double>(k));
    for (auto& row : Q) {
        double s = 0;
        for (auto& x : row) s += (x = u(g));
        for (auto& x : row) x /= s;
    }
    return Q;
}

inline Matrix random_positive(std::size_t n, std::mt19937_64& g, double lo = 0.01, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix M(n, std::vector<double>(n));
    for (auto& row : M)
        for (auto& x : row) x = u(g);
    return M;
}

inline std::vector<double> random_positive_vector(std::size_t n, std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(g);
    return v;
}

inline AlphabetPtr A3() { return Alphabet::digits(3); }
inline AlphabetPtr A2() { return Alphabet::digits(2); }

/// {0 -> 0, 1 -> 1, 2 -> 1}
inline AmalgamationMap merge_12(const AlphabetPtr& A, const AlphabetPtr& B) {
    return AmalgamationMap(A, B, {0, 1, 1});
}

/// The generic merged chain used across the suites.
inline Matrix generic_chain() { return {{0.5, 0.3, 0.2}, {0.1, 0.2, 0.7}, {0.6, 0.3, 0.1}}; }

inline oracle::TablePotential to_oracle(const LocallyConstantPotential& p) {
    return {p.alphabet(), p.range(), p.table()};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace hmg::testing
