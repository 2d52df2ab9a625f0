#include "hmgibbs/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmgibbs/error.hpp"
#include "hmgibbs/numeric.hpp"

namespace hmg {

namespace {

std::size_t state_count(std::size_t k, std::size_t r) {
    std::size_t s = 1;
    for (std::size_t i = 0; i < r; ++i) s *= k;
    return s;
}

std::vector<Rank> iota_ids(std::size_t n) {
    std::vector<Rank> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    return ids;
}

double log_trace(const IndexedMatrix& P) {
    double t = 0.0;
    for (std::size_t i = 0; i < P.rows(); ++i) t += P(i, i);
    return std::log(t) + P.log_scale();
}

}  // namespace

TransferMatrix build_transfer(const LocallyConstantPotential& pot) {
    const std::size_t k = pot.card(), r = pot.range(), S = state_count(k, r);
    const double top = pot.max_value();
    std::vector<double> m(S * S, 0.0);
    for (std::size_t v = 0; v < S; ++v)
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t w = v * k + c;
            m[v * S + w % S] = std::exp(pot.table()[w] - top);
        }
    auto ids = iota_ids(S);
    return TransferMatrix{pot, IndexedMatrix(S, S, std::move(m), top, ids, ids), r};
}

MarkovGibbsMeasure::MarkovGibbsMeasure(TransferMatrix transfer, PerronData perron)
    : transfer_(std::move(transfer)), perron_(std::move(perron)) {
    const std::size_t S = perron_.L.size();
    log_L_.resize(S);
    log_R_.resize(S);
    for (std::size_t i = 0; i < S; ++i) {
        log_L_[i] = std::log(perron_.L[i]);
        log_R_[i] = std::log(perron_.R[i]);
    }
    const auto [l_lo, l_hi] = std::minmax_element(log_L_.begin(), log_L_.end());
    const auto [r_lo, r_hi] = std::minmax_element(log_R_.begin(), log_R_.end());
    const double max_lr = *l_hi + *r_hi, min_lr = *l_lo + *r_lo;
    const double norm = transfer_.potential.sup_norm(), lp = perron_.log_rho;
    const double lk = std::log(static_cast<double>(transfer_.potential.card()));
    const std::size_t r = transfer_.r;
    // mu[w] exp(-(S_m psi - m P)) for m = |w| >= r is L R rho^r times the r periodic
    // wrap-around windows; for m < r it is a sum of k^{r-m} terms L R times rho^m e^{-S_m psi}.
    double lc = 0.0;
    for (std::size_t m = 1; m <= r; ++m) {
        const double mm = static_cast<double>(m), extra = (r - m) * lk;
        const double up = extra + max_lr + mm * lp + mm * norm;
        const double lo = extra + min_lr + mm * lp - mm * norm;
        lc = std::max({lc, up, -lo});
    }
    log_gibbs_constant_ = lc;
}

double MarkovGibbsMeasure::log_prob(std::span<const Symbol> w) const {
    const std::size_t m = w.size(), r = transfer_.r, k = transfer_.potential.card();
    if (m == 0) return 0.0;
    if (m < r) {
        const std::size_t span = state_count(k, r - m);
        const std::size_t base = rank_of(w, k) * span;
        std::vector<double> terms(span);
        for (std::size_t i = 0; i < span; ++i) terms[i] = log_L_[base + i] + log_R_[base + i];
        return logsumexp(terms);
    }
    const std::size_t S = log_L_.size();
    const auto& t = transfer_.potential.table();
    Rank state = rank_of(w.first(r), k);
    double acc = log_L_[state];
    for (std::size_t j = r; j < m; ++j) {
        const Rank win = state * k + w[j];
        acc += t[win];
        state = win % S;
    }
    return acc - static_cast<double>(m - r) * perron_.log_rho + log_R_[state];
}

MarkovGibbsMeasure measure_from(const LocallyConstantPotential& pot, const PerronOptions& opts) {
    TransferMatrix t = build_transfer(pot);
    PerronData pd = perron_data(t.matrix, opts);
    return MarkovGibbsMeasure(std::move(t), std::move(pd));
}

double cylinder_log_prob(const MarkovGibbsMeasure& m, const Word& w) {
    if (!same_alphabet(w.alphabet(), m.potential().alphabet()))
        throw ValidationError("cylinder word alphabet mismatch");
    return m.log_prob(w.letters());
}

double pressure_periodic(const LocallyConstantPotential& pot, std::size_t n, const EnumerationLimits& lim) {
    if (n < 1) throw ValidationError("period must be >= 1");
    const unsigned long long count = word_count(pot.card(), n, lim);
    std::vector<double> sums(count);
    std::vector<Symbol> w(n);
    for (unsigned long long i = 0; i < count; ++i) {
        unrank(i, pot.card(), w);
        sums[i] = birkhoff_sum_periodic(pot, std::span<const Symbol>(w));
    }
    return logsumexp(sums) / static_cast<double>(n);
}

double pressure_trace(const LocallyConstantPotential& pot, std::size_t n) {
    if (n < 1) throw ValidationError("period must be >= 1");
    const auto t = build_transfer(pot);
    return log_trace(t.matrix.power(static_cast<unsigned>(n))) / static_cast<double>(n);
}

double periodic_log_measure(const LocallyConstantPotential& pot, std::size_t p, const Word& w) {
    const std::size_t m = w.size(), r = pot.range(), k = pot.card();
    if (!same_alphabet(w.alphabet(), pot.alphabet())) throw ValidationError("word alphabet mismatch");
    if (p <= m + r) throw ValidationError("period must exceed |w| + r");
    const auto t = build_transfer(pot);
    const std::size_t S = t.matrix.rows();
    const IndexedMatrix Mp = t.matrix.power(static_cast<unsigned>(p));
    const double denom = log_trace(Mp);
    if (m < r) {
        const std::size_t span = state_count(k, r - m), base = w.rank() * span;
        double acc = 0.0;
        for (std::size_t i = 0; i < span; ++i) acc += Mp(base + i, base + i);
        return std::log(acc) + Mp.log_scale() - denom;
    }
    const auto& L = w.letters();
    Rank first = rank_of(std::span<const Symbol>(L).first(r), k), state = first;
    double acc = 0.0;
    for (std::size_t j = r; j < m; ++j) {
        const Rank win = state * k + L[j];
        acc += pot.table()[win];
        state = win % S;
    }
    const IndexedMatrix Mq = t.matrix.power(static_cast<unsigned>(p - m + r));
    return acc + std::log(Mq(state, first)) + Mq.log_scale() - denom;
}

double periodic_measure(const LocallyConstantPotential& pot, std::size_t p, const Word& w) {
    return std::exp(periodic_log_measure(pot, p, w));
}

double periodic_D0(const TransferMatrix& t) {
    const IndexedMatrix Mr = t.matrix.power(static_cast<unsigned>(t.r));
    const IndexedMatrix Mr1 = t.matrix.multiply(Mr);
    const std::size_t S = Mr.rows();
    double best = 0.0;
    std::vector<double> a(S), b(S);
    for (std::size_t z = 0; z < S; ++z) {
        for (std::size_t i = 0; i < S; ++i) {
            a[i] = Mr(i, z);
            b[i] = Mr1(i, z);
        }
        best = std::max(best, hilbert_metric(a, b));
    }
    return 2.0 * best;
}

GibbsReport gibbs_inequality_check(const MarkovGibbsMeasure& m, std::size_t n_max,
                                   const EnumerationLimits& lim) {
    constexpr double kSlack = 1e-9;  // log-domain rounding allowance
    GibbsReport rep;
    rep.log_C = m.log_gibbs_constant();
    rep.min_log_ratio = std::numeric_limits<double>::infinity();
    rep.max_log_ratio = -std::numeric_limits<double>::infinity();
    const auto& pot = m.potential();
    const std::size_t k = pot.card();
    for (std::size_t n = 0; n <= n_max; ++n) {
        const std::size_t len = n + 1;
        const unsigned long long count = word_count(k, len, lim);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        std::vector<Symbol> w(len);
        for (unsigned long long i = 0; i < count; ++i) {
            unrank(i, k, w);
            const double lr = m.log_prob(w) - birkhoff_sum_periodic(pot, std::span<const Symbol>(w)) +
                              static_cast<double>(len) * m.pressure();
            lo = std::min(lo, lr);
            hi = std::max(hi, lr);
            if (lr > rep.log_C + kSlack || lr < -rep.log_C - kSlack) {
                if (!rep.first_violation)
                    rep.first_violation = Word(pot.alphabet(), w).to_string();
                ++rep.violations;
            }
        }
        rep.words_checked += count;
        rep.min_by_n.push_back(lo);
        rep.max_by_n.push_back(hi);
        rep.min_log_ratio = std::min(rep.min_log_ratio, lo);
        rep.max_log_ratio = std::max(rep.max_log_ratio, hi);
    }
    return rep;
}

}  // namespace hmg
