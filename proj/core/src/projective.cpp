#include "hmgibbs/projective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hmgibbs/error.hpp"

namespace hmg {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_ids(const std::vector<Rank>& a, const std::vector<Rank>& b, const char* what) {
    if (!a.empty() && !b.empty() && a != b)
        throw ValidationError(std::string("index sets differ: ") + what);
}
}  // namespace

IndexedMatrix::IndexedMatrix(std::size_t rows, std::size_t cols, std::vector<double> mantissa,
                             double log_scale, std::vector<Rank> row_ids, std::vector<Rank> col_ids)
    : rows_(rows), cols_(cols), m_(std::move(mantissa)), log_scale_(log_scale),
      row_ids_(std::move(row_ids)), col_ids_(std::move(col_ids)) {
    if (rows_ == 0 || cols_ == 0) throw ValidationError("matrix dimensions must be positive");
    if (m_.size() != rows_ * cols_) throw ValidationError("matrix data size mismatch");
    if (!row_ids_.empty() && row_ids_.size() != rows_) throw ValidationError("row id count mismatch");
    if (!col_ids_.empty() && col_ids_.size() != cols_) throw ValidationError("column id count mismatch");
    if (!std::isfinite(log_scale_)) throw ValidationError("matrix log scale must be finite");
    for (double v : m_)
        if (!(v >= 0) || !std::isfinite(v)) throw ValidationError("matrix entries must be finite and >= 0");
    index_nonzeros();
}

void IndexedMatrix::index_nonzeros() {
    std::size_t nnz = 0;
    for (double v : m_) nnz += v != 0.0;
    nz_.clear();
    if (2 * nnz > m_.size()) return;
    nz_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (m_[i * cols_ + j] != 0.0) nz_[i].push_back(static_cast<std::uint32_t>(j));
}

IndexedMatrix IndexedMatrix::from_log(std::size_t rows, std::size_t cols,
                                      const std::vector<double>& log_entries) {
    if (log_entries.size() != rows * cols) throw ValidationError("matrix data size mismatch");
    double mx = kNegInf;
    for (double v : log_entries) {
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
            throw ValidationError("log entries must be finite or -inf");
        mx = std::max(mx, v);
    }
    if (mx == kNegInf) mx = 0.0;
    std::vector<double> m(log_entries.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = log_entries[i] == kNegInf ? 0.0 : std::exp(log_entries[i] - mx);
    return IndexedMatrix(rows, cols, std::move(m), mx);
}

IndexedMatrix IndexedMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ValidationError("matrix needs at least one row");
    const std::size_t c = rows.front().size();
    std::vector<double> m;
    for (const auto& r : rows) {
        if (r.size() != c) throw ValidationError("ragged matrix rows");
        m.insert(m.end(), r.begin(), r.end());
    }
    return IndexedMatrix(rows.size(), c, std::move(m));
}

double IndexedMatrix::value(std::size_t i, std::size_t j) const {
    return (*this)(i, j) * std::exp(log_scale_);
}

bool IndexedMatrix::row_allowable() const noexcept {
    for (std::size_t i = 0; i < rows_; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < cols_ && !any; ++j) any = m_[i * cols_ + j] > 0;
        if (!any) return false;
    }
    return true;
}

void IndexedMatrix::require_row_allowable() const {
    for (std::size_t i = 0; i < rows_; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < cols_ && !any; ++j) any = m_[i * cols_ + j] > 0;
        if (!any) throw RowAllowabilityError("matrix row " + std::to_string(i) + " is identically zero");
    }
}

bool IndexedMatrix::positive() const noexcept {
    return std::all_of(m_.begin(), m_.end(), [](double v) { return v > 0; });
}

IndexedMatrix IndexedMatrix::transpose() const {
    std::vector<double> t(m_.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t[j * rows_ + i] = m_[i * cols_ + j];
    return IndexedMatrix(cols_, rows_, std::move(t), log_scale_, col_ids_, row_ids_);
}

IndexedMatrix IndexedMatrix::multiply(const IndexedMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw ValidationError("matrix product dimension mismatch");
    check_ids(col_ids_, rhs.row_ids_, "matrix product");
    const std::size_t c = rhs.cols_;
    std::vector<double> out(rows_ * c, 0.0);
    auto accumulate = [&](std::size_t i, std::size_t l) {
        const double a = m_[i * cols_ + l];
        if (a == 0.0) return;
        const double* b = &rhs.m_[l * c];
        double* o = &out[i * c];
        for (std::size_t j = 0; j < c; ++j) o[j] += a * b[j];
    };
    for (std::size_t i = 0; i < rows_; ++i) {
        if (!nz_.empty())
            for (std::uint32_t l : nz_[i]) accumulate(i, l);
        else
            for (std::size_t l = 0; l < cols_; ++l) accumulate(i, l);
    }
    double mx = 0.0;
    for (double v : out) mx = std::max(mx, v);
    double ls = log_scale_ + rhs.log_scale_;
    if (mx > 0) {
        for (double& v : out) v /= mx;
        ls += std::log(mx);
    }
    return IndexedMatrix(rows_, c, std::move(out), ls, row_ids_, rhs.col_ids_);
}

IndexedMatrix IndexedMatrix::power(unsigned e) const {
    if (rows_ != cols_) throw ValidationError("power of a non-square matrix");
    if (e == 0) {
        std::vector<double> id(rows_ * rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) id[i * rows_ + i] = 1.0;
        return IndexedMatrix(rows_, rows_, std::move(id), 0.0, row_ids_, col_ids_);
    }
    // Left-multiplying by the base keeps each step as cheap as the base is sparse.
    IndexedMatrix p = *this;
    for (unsigned i = 1; i < e; ++i) p = multiply(p);
    return p;
}

IndexedMatrix IndexedMatrix::scaled(double log_c) const {
    IndexedMatrix s = *this;
    s.log_scale_ += log_c;
    return s;
}

void IndexedMatrix::apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* row = &m_[i * cols_];
        double acc = 0.0;
        if (!nz_.empty())
            for (std::uint32_t j : nz_[i]) acc += row[j] * x[j];
        else
            for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void IndexedMatrix::apply_transpose(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* row = &m_[i * cols_];
        const double xi = x[i];
        if (!nz_.empty())
            for (std::uint32_t j : nz_[i]) y[j] += row[j] * xi;
        else
            for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * xi;
    }
}

SimplexVector SimplexVector::from_positive(std::vector<double> v, std::vector<Rank> ids) {
    if (v.empty()) throw ValidationError("simplex vector must be nonempty");
    if (!ids.empty() && ids.size() != v.size()) throw ValidationError("simplex id count mismatch");
    double s = 0.0;
    for (double x : v) {
        if (!(x > 0) || !std::isfinite(x)) throw ValidationError("simplex entries must be strictly positive");
        s += x;
    }
    for (double& x : v) x /= s;
    SimplexVector out;
    out.x_ = std::move(v);
    out.ids_ = std::move(ids);
    return out;
}

SimplexVector SimplexVector::uniform(std::size_t n, std::vector<Rank> ids) {
    return from_positive(std::vector<double>(n, 1.0), std::move(ids));
}

double hilbert_metric(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) throw ValidationError("hilbert metric: size mismatch");
    double hi = kNegInf, lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw ValidationError("hilbert metric needs positive vectors");
        const double d = std::log(x[i]) - std::log(y[i]);
        hi = std::max(hi, d);
        lo = std::min(lo, d);
    }
    return hi - lo;
}

double hilbert_metric(const SimplexVector& x, const SimplexVector& y) {
    check_ids(x.ids(), y.ids(), "hilbert metric");
    return hilbert_metric(std::span<const double>(x.values()), std::span<const double>(y.values()));
}

double phi_of(const IndexedMatrix& M) {
    if (!M.positive()) return 0.0;
    const std::size_t n = M.rows(), m = M.cols();
    std::vector<double> lm(n * m);
    for (std::size_t i = 0; i < n * m; ++i) lm[i] = std::log(M.mantissa()[i]);
    // For a row pair the cross-ratio minimum is min_j(ratio_j) / max_j(ratio_j).
    double best = 0.0;
    for (std::size_t e = 0; e < n; ++e)
        for (std::size_t f = e + 1; f < n; ++f) {
            double hi = kNegInf, lo = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) {
                const double d = lm[e * m + j] - lm[f * m + j];
                hi = std::max(hi, d);
                lo = std::min(lo, d);
            }
            best = std::min(best, lo - hi);
        }
    return std::exp(best);
}

double tau_from_phi(double phi) noexcept {
    const double s = std::sqrt(phi);
    return (1.0 - s) / (1.0 + s);
}

double tau_of(const IndexedMatrix& M) { return tau_from_phi(phi_of(M)); }

SimplexVector project_apply(const IndexedMatrix& M, const SimplexVector& x) {
    const IndexedMatrix* chain[] = {&M};
    return normalized_product(chain, x).vector;
}

unsigned primitivity_index(const IndexedMatrix& M) {
    if (M.rows() != M.cols()) throw ValidationError("primitivity index needs a square matrix");
    const std::size_t n = M.rows(), W = (n + 63) / 64;
    using Bits = std::vector<std::uint64_t>;
    std::vector<Bits> A(n, Bits(W, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (M(i, j) > 0) A[i][j / 64] |= std::uint64_t{1} << (j % 64);
    Bits full(W, ~std::uint64_t{0});
    if (n % 64) full[W - 1] = (std::uint64_t{1} << (n % 64)) - 1;
    auto all_full = [&](const std::vector<Bits>& P) {
        for (const auto& row : P)
            if (row != full) return false;
        return true;
    };
    const std::size_t bound = (n - 1) * (n - 1) + 1;
    std::vector<Bits> P = A;
    for (std::size_t l = 1; l <= bound; ++l) {
        if (all_full(P)) return static_cast<unsigned>(l);
        std::vector<Bits> next(n, Bits(W, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t w = 0; w < W; ++w) {
                std::uint64_t bits = P[i][w];
                while (bits) {
                    const std::size_t j = w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits));
                    bits &= bits - 1;
                    for (std::size_t v = 0; v < W; ++v) next[i][v] |= A[j][v];
                }
            }
        if (next == P) break;  // pattern is stationary and not full
        P = std::move(next);
    }
    throw NotPrimitive("matrix has no strictly positive power within the Wielandt bound");
}

namespace {

struct SideResult {
    std::vector<double> x;
    double bound = 0;
    double a_posteriori = 0;
    std::size_t iterations = 0;
};

void step(const IndexedMatrix& M, bool transposed, std::vector<double>& x, std::vector<double>& y) {
    if (transposed)
        M.apply_transpose(x, y);
    else
        M.apply(x, y);
    double s = 0.0;
    for (double v : y) s += v;
    for (double& v : y) v /= s;
    x.swap(y);
}

SideResult iterate_side(const IndexedMatrix& M, bool transposed, unsigned ell, double tau, double tol_eff,
                        const PerronOptions& opts, const std::optional<std::vector<double>>& warm) {
    const std::size_t n = M.rows();
    SideResult out;
    std::vector<double> x(n, 1.0 / n), y(n);
    if (warm) x = SimplexVector::from_positive(*warm).values();
    if (opts.certified) {
        std::vector<double> x1 = x;
        step(M, transposed, x1, y);
        const double d0 = hilbert_metric(x, x1);
        // delta(x_N, x*) <= l d0 tau^{floor(N/l)} / (1 - tau); choose N = q l a priori.
        std::size_t q = 0;
        if (d0 > 0) {
            if (tau == 0.0) {
                q = 1;
            } else {
                const double target = tol_eff * (1.0 - tau) / (ell * d0);
                const double qq = target >= 1.0 ? 0.0 : std::ceil(std::log(target) / std::log(tau));
                if (!std::isfinite(qq) || qq * ell > static_cast<double>(opts.max_iterations))
                    throw CertificationError("perron iteration: tolerance unreachable within the iteration cap");
                q = static_cast<std::size_t>(qq);
            }
        }
        const std::size_t N = q * ell;
        for (std::size_t i = 0; i < N; ++i) step(M, transposed, x, y);
        out.iterations = N;
        out.bound = d0 == 0 ? 0.0 : (tau == 0.0 && q > 0 ? 0.0 : ell * d0 * std::pow(tau, q) / (1.0 - tau));
    } else {
        // delta(z, z*) <= tau delta(x, z) / (1 - tau) for z = F^l x.
        while (true) {
            std::vector<double> z = x;
            for (unsigned i = 0; i < ell; ++i) step(M, transposed, z, y);
            out.iterations += ell;
            const double bound = tau * hilbert_metric(x, z) / (1.0 - tau);
            x = std::move(z);
            if (bound <= tol_eff) {
                out.bound = bound;
                break;
            }
            if (out.iterations > opts.max_iterations)
                throw CertificationError("perron iteration: tolerance unreachable within the iteration cap");
        }
    }
    std::vector<double> z = x;
    for (unsigned i = 0; i < ell; ++i) step(M, transposed, z, y);
    out.a_posteriori = hilbert_metric(x, z);
    out.x = std::move(x);
    return out;
}

}  // namespace

PerronData perron_data(const IndexedMatrix& M, const PerronOptions& opts) {
    if (M.rows() != M.cols()) throw ValidationError("perron data needs a square matrix");
    if (!(opts.tol > 0)) throw ValidationError("perron tolerance must be positive");
    if (opts.certified && (opts.warm_start_right || opts.warm_start_left))
        throw ValidationError("warm starts are only allowed in uncertified mode");
    const std::size_t n = M.rows();
    PerronData pd;
    pd.certified = opts.certified;
    pd.primitivity_index = primitivity_index(M);
    pd.tau = tau_of(M.power(pd.primitivity_index));
    if (!(pd.tau < 1.0)) throw NotPrimitive("contraction coefficient of the primitive power is 1");

    // A Hilbert distance eps to the fixed point moves every ratio (Mx)_i / x_i by at most
    // a factor e^{±eps}, so eps = tol/4 keeps the sup-norm residual under tol rho.
    const auto right = iterate_side(M, false, pd.primitivity_index, pd.tau, opts.tol / 4, opts,
                                    opts.warm_start_right);
    pd.R = SimplexVector::from_positive(right.x, M.row_ids());
    pd.certified_residual = right.bound;
    pd.a_posteriori = right.a_posteriori;
    pd.iterations = right.iterations;

    std::vector<double> y(n);
    M.apply(pd.R.values(), y);
    double rho_m = 0.0;
    for (double v : y) rho_m += v;
    pd.log_rho = std::log(rho_m) + M.log_scale();
    pd.rho = std::exp(pd.log_rho);
    for (std::size_t i = 0; i < n; ++i)
        pd.residual_right = std::max(pd.residual_right, std::abs(y[i] - rho_m * pd.R[i]) / rho_m);

    // L_j <= 1 / R_j once L . R = 1, so the left tolerance absorbs min R.
    const double rmin = *std::min_element(pd.R.values().begin(), pd.R.values().end());
    const auto left = iterate_side(M, true, pd.primitivity_index, pd.tau, opts.tol * std::min(1.0, rmin) / 4,
                                   opts, opts.warm_start_left);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += left.x[i] * pd.R[i];
    pd.L.resize(n);
    for (std::size_t i = 0; i < n; ++i) pd.L[i] = left.x[i] / dot;
    pd.certified_residual_left = left.bound;
    pd.a_posteriori_left = left.a_posteriori;
    pd.iterations += left.iterations;

    M.apply_transpose(pd.L, y);
    for (std::size_t j = 0; j < n; ++j)
        pd.residual_left = std::max(pd.residual_left, std::abs(y[j] - rho_m * pd.L[j]) / rho_m);
    return pd;
}

ProductResult normalized_product(std::span<const IndexedMatrix* const> chain, const SimplexVector& seed) {
    ProductResult out;
    std::vector<double> x = seed.values(), y;
    std::vector<Rank> ids = seed.ids();
    for (std::size_t k = chain.size(); k-- > 0;) {
        const IndexedMatrix& M = *chain[k];
        if (M.cols() != x.size()) throw ValidationError("normalized product: dimension mismatch");
        check_ids(M.col_ids(), ids, "normalized product");
        y.assign(M.rows(), 0.0);
        M.apply(x, y);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (!(y[i] > 0))
                throw RowAllowabilityError("normalized product: matrix row " + std::to_string(i) +
                                           " annihilates a positive vector");
            s += y[i];
        }
        for (double& v : y) v /= s;
        out.log_scale += std::log(s) + M.log_scale();
        x.swap(y);
        ids = M.row_ids();
    }
    out.vector = SimplexVector::from_positive(std::move(x), std::move(ids));
    return out;
}

ProductResult normalized_product(const std::vector<IndexedMatrix>& chain, const SimplexVector& seed) {
    std::vector<const IndexedMatrix*> ptrs;
    for (const auto& m : chain) ptrs.push_back(&m);
    return normalized_product(std::span<const IndexedMatrix* const>(ptrs), seed);
}

}  // namespace hmg
