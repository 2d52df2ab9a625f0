#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hmgibbs/symbolic.hpp"

namespace hmg {

/// Dense nonnegative matrix stored as mantissas times exp(log_scale).
/// Row and column ids (ranks of the indexing words) are optional; when both operands
/// carry ids they must agree wherever indices meet.
class IndexedMatrix {
public:
    IndexedMatrix() = default;
    IndexedMatrix(std::size_t rows, std::size_t cols, std::vector<double> mantissa,
                  double log_scale = 0.0, std::vector<Rank> row_ids = {},
                  std::vector<Rank> col_ids = {});
    /// Entries given as logs; -inf marks a structural zero.
    static IndexedMatrix from_log(std::size_t rows, std::size_t cols,
                                  const std::vector<double>& log_entries);
    static IndexedMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_[i * cols_ + j]; }
    double& at(std::size_t i, std::size_t j) noexcept { return m_[i * cols_ + j]; }
    double log_scale() const noexcept { return log_scale_; }
    const std::vector<double>& mantissa() const noexcept { return m_; }
    const std::vector<Rank>& row_ids() const noexcept { return row_ids_; }
    const std::vector<Rank>& col_ids() const noexcept { return col_ids_; }
    /// Actual entry value; may overflow for extreme scales.
    double value(std::size_t i, std::size_t j) const;

    bool row_allowable() const noexcept;
    /// Throws RowAllowabilityError naming the first zero row.
    void require_row_allowable() const;
    bool positive() const noexcept;

    IndexedMatrix transpose() const;
    /// Product with mantissas renormalized to max 1; skips zero entries of the left factor.
    IndexedMatrix multiply(const IndexedMatrix& rhs) const;
    IndexedMatrix power(unsigned e) const;
    IndexedMatrix scaled(double log_c) const;

    /// y = mantissa * x (log_scale not applied).
    void apply(std::span<const double> x, std::span<double> y) const;
    void apply_transpose(std::span<const double> x, std::span<double> y) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> m_;
    double log_scale_ = 0.0;
    std::vector<Rank> row_ids_, col_ids_;
    std::vector<std::vector<std::uint32_t>> nz_;  // column indices of nonzeros, when sparse
    void index_nonzeros();
};

/// Strictly positive probability vector.
class SimplexVector {
public:
    SimplexVector() = default;
    /// Normalizes a strictly positive vector; throws ValidationError otherwise.
    static SimplexVector from_positive(std::vector<double> v, std::vector<Rank> ids = {});
    static SimplexVector uniform(std::size_t n, std::vector<Rank> ids = {});

    std::size_t size() const noexcept { return x_.size(); }
    double operator[](std::size_t i) const noexcept { return x_[i]; }
    const std::vector<double>& values() const noexcept { return x_; }
    const std::vector<Rank>& ids() const noexcept { return ids_; }

private:
    std::vector<double> x_;
    std::vector<Rank> ids_;
};

/// Hilbert projective distance max log(x/y) - min log(x/y); scale invariant.
double hilbert_metric(std::span<const double> x, std::span<const double> y);
double hilbert_metric(const SimplexVector& x, const SimplexVector& y);

/// Minimal cross ratio; 0 when any entry vanishes.
double phi_of(const IndexedMatrix& M);
/// (1 - sqrt(phi)) / (1 + sqrt(phi)).
double tau_of(const IndexedMatrix& M);
double tau_from_phi(double phi) noexcept;

SimplexVector project_apply(const IndexedMatrix& M, const SimplexVector& x);

/// Least l with M^l > 0, searched up to the Wielandt bound (n-1)^2 + 1.
unsigned primitivity_index(const IndexedMatrix& M);

struct PerronOptions {
    double tol = 1e-12;
    /// Cap on single-step applications of M per eigenvector.
    std::size_t max_iterations = 50'000'000;
    /// Certified runs start from the uniform vector and stop on the a-priori bound.
    bool certified = true;
    std::optional<std::vector<double>> warm_start_right;
    std::optional<std::vector<double>> warm_start_left;
};

struct PerronData {
    double rho = 0;
    double log_rho = 0;
    SimplexVector R;
    /// Positive, scaled so that L . R = 1.
    std::vector<double> L;
    unsigned primitivity_index = 0;
    double tau = 0;
    /// Hilbert-distance bound between the returned vectors and the true eigenvectors.
    double certified_residual = 0;
    double certified_residual_left = 0;
    /// Observed delta(x_N, x_{N+l}) at termination.
    double a_posteriori = 0;
    double a_posteriori_left = 0;
    /// max_i |(MR)_i - rho R_i| / rho and the left analogue.
    double residual_right = 0;
    double residual_left = 0;
    std::size_t iterations = 0;
    bool certified = true;
};

PerronData perron_data(const IndexedMatrix& M, const PerronOptions& opts = {});

struct ProductResult {
    SimplexVector vector;
    /// log of |M_1 ... M_k seed|_1, seed normalized.
    double log_scale = 0;
};

/// Right-to-left application M_1(M_2(...(M_k seed))) with accumulated log normalizers.
ProductResult normalized_product(std::span<const IndexedMatrix* const> chain, const SimplexVector& seed);
ProductResult normalized_product(const std::vector<IndexedMatrix>& chain, const SimplexVector& seed);

}  // namespace hmg
