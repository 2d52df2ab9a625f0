#include "oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace hmg::oracle {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& M) {
    Eigen::MatrixXd E(M.size(), M.front().size());
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M[i].size(); ++j) E(i, j) = M[i][j];
    return E;
}

Eigen::VectorXd dominant(const Eigen::MatrixXd& A, double& rho) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
    rho = es.eigenvalues()[best].real();
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    if (v.sum() < 0) v = -v;
    return v;
}

std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t p = 1;
    while (e--) p *= b;
    return p;
}

}  // namespace

EigenTriple dense_perron(const Matrix& M) {
    const Eigen::MatrixXd A = to_eigen(M);
    EigenTriple t;
    double rho_t = 0;
    Eigen::VectorXd R = dominant(A, t.rho);
    Eigen::VectorXd L = dominant(A.transpose(), rho_t);
    R /= R.sum();
    L /= L.dot(R);
    t.R.assign(R.data(), R.data() + R.size());
    t.L.assign(L.data(), L.data() + L.size());
    return t;
}

Matrix transfer_matrix(const TablePotential& pot) {
    const std::size_t k = pot.alphabet->size(), S = ipow(k, pot.r), tail = ipow(k, pot.r - 1);
    Matrix M(S, std::vector<double>(S, 0.0));
    for (std::size_t v = 0; v < S; ++v)
        for (std::size_t w = 0; w < S; ++w)
            if (v % tail == w / k) M[v][w] = std::exp(pot.table[v * k + w % k]);
    return M;
}

double oracle_cylinder(const TablePotential& pot, const Word& w, std::size_t p, const OracleConfig& cfg) {
    if (p > cfg.max_period) throw std::invalid_argument("period above oracle cap");
    if (p <= w.size() + pot.r) throw std::invalid_argument("period must exceed |w| + r");
    const std::size_t k = pot.alphabet->size(), count = ipow(k, p);
    std::vector<Symbol> a(p);
    // Two passes: max exponent first so the sums never overflow.
    std::vector<double> S(count);
    double top = -INFINITY;
    for (std::size_t i = 0; i < count; ++i) {
        unrank(i, k, a);
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            std::size_t win = 0;
            for (std::size_t t = 0; t <= pot.r; ++t) win = win * k + a[(j + t) % p];
            s += pot.table[win];
        }
        S[i] = s;
        top = std::max(top, s);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        unrank(i, k, a);
        const double e = std::exp(S[i] - top);
        den += e;
        bool match = true;
        for (std::size_t j = 0; j < w.size() && match; ++j) match = a[j] == w[j];
        if (match) num += e;
    }
    return num / den;
}

double oracle_parry_log_prob(const TablePotential& pot, const EigenTriple& eig, const Word& w) {
    const std::size_t k = pot.alphabet->size(), r = pot.r, m = w.size();
    if (m < r) {
        const std::size_t span = ipow(k, r - m), base = w.rank() * span;
        double acc = 0.0;
        for (std::size_t i = 0; i < span; ++i) acc += eig.L[base + i] * eig.R[base + i];
        return std::log(acc);
    }
    double acc = std::log(eig.L[rank_of(std::span<const Symbol>(w.letters()).first(r), k)]);
    for (std::size_t j = 0; j + r < m; ++j)
        acc += pot.table[rank_of(std::span<const Symbol>(w.letters()).subspan(j, r + 1), k)] - std::log(eig.rho);
    acc += std::log(eig.R[rank_of(std::span<const Symbol>(w.letters()).subspan(m - r, r), k)]);
    return acc;
}

double oracle_pushforward(const TablePotential& pot, const AmalgamationMap& map, const Word& b,
                          const OracleConfig& cfg) {
    if (b.size() > cfg.max_word_length) throw std::invalid_argument("word above oracle cap");
    const EigenTriple eig = dense_perron(transfer_matrix(pot));
    double acc = 0.0;
    for (const Word& v : fiber(map, b)) acc += std::exp(oracle_parry_log_prob(pot, eig, v));
    return std::log(acc);
}

std::optional<Matrix> oracle_lumped_chain(const Matrix& Q, const AmalgamationMap& map, double tol) {
    const std::size_t kb = map.target()->size();
    Matrix P(kb, std::vector<double>(kb, 0.0));
    for (std::size_t b = 0; b < kb; ++b)
        for (std::size_t c = 0; c < kb; ++c) {
            const auto& Fb = map.preimage(static_cast<Symbol>(b));
            const auto& Fc = map.preimage(static_cast<Symbol>(c));
            double ref = 0.0;
            for (std::size_t i = 0; i < Fb.size(); ++i) {
                double s = 0.0;
                for (Symbol a2 : Fc) s += Q[Fb[i]][a2];
                if (i == 0)
                    ref = s;
                else if (std::abs(s - ref) > tol)
                    return std::nullopt;
            }
            P[b][c] = ref;
        }
    return P;
}

std::vector<double> oracle_stationary(const Matrix& Q) {
    const std::size_t n = Q.size();
    Eigen::MatrixXd A = to_eigen(Q).transpose() - Eigen::MatrixXd::Identity(n, n);
    A.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd pi = A.fullPivLu().solve(rhs);
    return std::vector<double>(pi.data(), pi.data() + n);
}

}  // namespace hmg::oracle
