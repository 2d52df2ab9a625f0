#pragma once

#include <optional>
#include <vector>

#include "hmgibbs/symbolic.hpp"

// Brute-force references for tests. Nothing here touches the pipeline beyond words and maps.
namespace hmg::oracle {

struct OracleConfig {
    std::size_t max_word_length = 12;
    std::size_t max_period = 14;
    double tolerance = 1e-10;
};

/// Raw (r+1)-symbol table indexed by lexicographic window rank.
struct TablePotential {
    AlphabetPtr alphabet;
    std::size_t r = 1;
    std::vector<double> table;
};

using Matrix = std::vector<std::vector<double>>;

struct EigenTriple {
    double rho = 0;
    std::vector<double> R;  // sums to 1
    std::vector<double> L;  // L . R = 1
};

/// Dense eigensolver (Eigen) on a positive-spectral-radius nonnegative matrix.
EigenTriple dense_perron(const Matrix& M);

/// Transfer matrix rebuilt from the overlap rule.
Matrix transfer_matrix(const TablePotential& pot);

/// Periodic-point measure of [w] by enumerating all |A|^p points.
double oracle_cylinder(const TablePotential& pot, const Word& w, std::size_t p, const OracleConfig& cfg = {});

/// log mu[w] from the Parry formula with dense eigen data; shorter words sum completions.
double oracle_parry_log_prob(const TablePotential& pot, const EigenTriple& eig, const Word& w);

/// log nu[b] as the plain sum of Parry probabilities over the fiber.
double oracle_pushforward(const TablePotential& pot, const AmalgamationMap& map, const Word& b,
                          const OracleConfig& cfg = {});

/// Lumped transition matrix on B, or nullopt when Q is not lumpable.
std::optional<Matrix> oracle_lumped_chain(const Matrix& Q, const AmalgamationMap& map, double tol = 1e-12);

/// Stationary distribution of a row-stochastic matrix via a linear solve.
std::vector<double> oracle_stationary(const Matrix& Q);

}  // namespace hmg::oracle
