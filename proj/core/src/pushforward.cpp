#include "hmgibbs/pushforward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmgibbs/error.hpp"
#include "hmgibbs/numeric.hpp"

namespace hmg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t p = 1;
    for (std::size_t i = 0; i < e; ++i) p *= b;
    return p;
}

}  // namespace

RestrictedMatrixFamily::RestrictedMatrixFamily(const TransferMatrix& base, const AmalgamationMap& map,
                                               bool verify_products, const EnumerationLimits& lim)
    : map_(map), r_(base.r) {
    if (!same_alphabet(map.source(), base.potential.alphabet()))
        throw ValidationError("amalgamation source differs from the potential alphabet");
    const std::size_t k = map.source()->size(), kb = map.target()->size();
    const std::size_t S = ipow(k, r_), SB = ipow(kb, r_);
    word_count(kb, r_ + 1, lim);

    image_.resize(S);
    position_.resize(S);
    fibers_.assign(SB, {});
    std::vector<Symbol> v(r_);
    for (std::size_t s = 0; s < S; ++s) {
        unrank(s, k, v);
        Rank u = 0;
        for (Symbol a : v) u = u * kb + map(a);
        image_[s] = u;
        position_[s] = fibers_[u].size();
        fibers_[u].push_back(s);
    }

    const IndexedMatrix& M = base.matrix;
    blocks_.reserve(SB * kb);
    for (std::size_t w = 0; w < SB * kb; ++w) {
        const auto& rows = fibers_[w / kb];
        const auto& cols = fibers_[w % SB];
        if (rows.empty() || cols.empty()) throw Error("empty fiber block");
        std::vector<double> m(rows.size() * cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) m[i * cols.size() + j] = M(rows[i], cols[j]);
        blocks_.emplace_back(rows.size(), cols.size(), std::move(m), M.log_scale(), rows, cols);
        blocks_.back().require_row_allowable();
    }

    if (!verify_products) return;
    word_count(kb, 2 * r_, lim);
    products_positive_ = true;
    // Depth-first over B^{2r}: prefix products of consecutive blocks along the word.
    struct Frame { IndexedMatrix P; Rank window; std::size_t depth; };
    std::vector<Frame> stack;
    for (std::size_t w = 0; w < SB * kb; ++w) stack.push_back({blocks_[w], w, 1});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (f.depth == r_) {
            ++products_checked_;
            if (!f.P.positive()) {
                products_positive_ = false;
                max_product_tau_ = 1.0;
            } else {
                max_product_tau_ = std::max(max_product_tau_, tau_of(f.P));
            }
            continue;
        }
        for (std::size_t c = 0; c < kb; ++c) {
            const Rank next = (f.window % SB) * kb + c;
            stack.push_back({f.P.multiply(blocks_[next]), next, f.depth + 1});
        }
    }
    products_verified_ = true;
}

RestrictedMatrixFamily build_family(const TransferMatrix& transfer, const AmalgamationMap& map,
                                    const EnumerationLimits& lim) {
    return RestrictedMatrixFamily(transfer, map, true, lim);
}

PushforwardMeasure::PushforwardMeasure(const LocallyConstantPotential& pot, const AmalgamationMap& map,
                                       const PushforwardOptions& opts)
    : base_(measure_from(pot, opts.perron)),
      family_(base_.transfer(), map, opts.verify_products, opts.limits) {
    const double s = opts.s_psi ? *opts.s_psi : variation_profile(pot).s_psi;
    const double norm = opts.psi_norm ? *opts.psi_norm : pot.sup_norm();
    constants_ = pushforward_constants(pot.card(), norm, s);

    const std::size_t SB = ipow(family_.target_card(), family_.range());
    const auto& pd = base_.perron();
    left_.resize(SB);
    right_.resize(SB);
    log_mass_r_.resize(SB);
    for (std::size_t u = 0; u < SB; ++u) {
        double mass = 0.0;
        for (Rank v : family_.fiber(u)) {
            left_[u].push_back(pd.L[v]);
            right_[u].push_back(pd.R[v]);
            mass += pd.L[v] * pd.R[v];
        }
        log_mass_r_[u] = std::log(mass);
    }

    // phi_r(b) = log(a.x / c.x) - log rho with a = M_w^T L_{w_0^{r-1}}, c = L_{w_1^r}; a ratio
    // of linear forms on the simplex lies between the extreme coordinate ratios.
    const std::size_t kb = family_.target_card();
    phi_lo_ = kInf;
    phi_hi_ = -kInf;
    for (std::size_t w = 0; w < family_.block_count(); ++w) {
        const IndexedMatrix& B = family_.block(w);
        std::vector<double> a(B.cols());
        B.apply_transpose(left_[w / kb], a);
        const auto& c = left_[w % SB];
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double v = std::log(a[j]) + B.log_scale() - std::log(c[j]) - log_rho();
            phi_lo_ = std::min(phi_lo_, v);
            phi_hi_ = std::max(phi_hi_, v);
        }
    }
}

double PushforwardMeasure::log_prob(std::span<const Symbol> b) const {
    const std::size_t m = b.size(), r = range(), kb = family_.target_card();
    if (m == 0) return 0.0;
    if (m < r) {
        const std::size_t span = ipow(kb, r - m), base = rank_of(b, kb) * span;
        return logsumexp(std::span<const double>(log_mass_r_).subspan(base, span));
    }
    if (m == r) return log_mass_r_[rank_of(b, kb)];
    std::vector<const IndexedMatrix*> chain;
    chain.reserve(m - r);
    for (std::size_t j = 0; j + r < m; ++j) chain.push_back(&family_.block(rank_of(b.subspan(j, r + 1), kb)));
    const Rank tail = rank_of(b.subspan(m - r, r), kb);
    const auto& R = right_[tail];
    double rs = 0.0;
    for (double v : R) rs += v;
    const auto res = normalized_product(chain, SimplexVector::from_positive(R, family_.fiber(tail)));
    const auto& L = left_[rank_of(b.first(r), kb)];
    double dot = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i) dot += L[i] * res.vector[i];
    return std::log(dot) + res.log_scale + std::log(rs) - static_cast<double>(m - r) * log_rho();
}

double pushforward_cylinder_log_prob(const PushforwardMeasure& pf, const Word& b) {
    if (!same_alphabet(b.alphabet(), pf.map().target()))
        throw ValidationError("pushforward word must be over the target alphabet");
    return pf.log_prob(b.letters());
}

TailVector tail_vector(const PushforwardMeasure& pf, std::span<const Symbol> b, std::size_t n) {
    const std::size_t r = pf.range(), kb = pf.family().target_card();
    if (n <= r) throw ValidationError("tail vector depth must exceed r");
    if (b.size() < n + 1) throw ValidationError("tail vector needs b_0 .. b_n");
    std::vector<const IndexedMatrix*> chain;
    chain.reserve(n - r);
    for (std::size_t j = 1; j + r <= n; ++j) chain.push_back(&pf.family().block(rank_of(b.subspan(j, r + 1), kb)));
    const Rank seed = rank_of(b.subspan(n - r + 1, r), kb);
    TailVector tv;
    tv.context.assign(b.begin() + 1, b.begin() + n + 1);
    tv.vector = normalized_product(chain, SimplexVector::from_positive(pf.right(seed), pf.family().fiber(seed))).vector;
    tv.n = n;
    tv.truncation_error = truncation_error(pf.constants(), r, n);
    return tv;
}

namespace {

double ansatz_value(const PushforwardMeasure& pf, std::span<const Symbol> b, const SimplexVector& x) {
    const std::size_t r = pf.range(), kb = pf.family().target_card();
    const IndexedMatrix& B = pf.family().block(rank_of(b.first(r + 1), kb));
    std::vector<double> y(B.rows());
    B.apply(x.values(), y);
    const auto& L0 = pf.left(rank_of(b.first(r), kb));
    const auto& L1 = pf.left(rank_of(b.subspan(1, r), kb));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) num += L0[i] * y[i];
    for (std::size_t j = 0; j < x.size(); ++j) den += L1[j] * x[j];
    return std::log(num) + B.log_scale() - std::log(den) - pf.log_rho();
}

}  // namespace

InducedValue induced_potential_exact_r(const PushforwardMeasure& pf, const Word& b, std::size_t n) {
    if (!same_alphabet(b.alphabet(), pf.map().target()))
        throw ValidationError("induced potential word must be over the target alphabet");
    const std::size_t r = pf.range();
    if (n <= r) throw ValidationError("induced potential depth n must exceed r");
    if (b.size() < n + 1) throw ValidationError("induced potential needs a word of length >= n + 1");
    std::span<const Symbol> L(b.letters());
    const TailVector tv = tail_vector(pf, L, n);
    InducedValue out;
    out.word = b.to_string();
    out.r = r;
    out.n = n;
    out.value = ansatz_value(pf, L, tv.vector);
    out.error_bar = induced_error_bar(pf.constants(), r, n);
    out.exact_bar = out.error_bar;
    out.direct_log_ratio = pf.log_prob(L.first(n + 1)) - pf.log_prob(L.subspan(1, n));
    out.constants = pf.constants();
    return out;
}

double approximant_norm(const VariationBoundedPotential& psi, std::size_t r, const EnumerationLimits& lim) {
    const auto& A = psi.alphabet();
    const unsigned long long n = word_count(A->size(), r + 1, lim);
    double s = 0.0;
    for (unsigned long long i = 0; i < n; ++i) s = std::max(s, std::abs(psi.evaluate(Word::from_rank(A, i, r + 1))));
    return s + psi.var_bound(r);
}

GeneralSchedule plan_general(const VariationBoundedPotential& psi, double tol, const GeneralOptions& opts) {
    if (!(tol > 0)) throw ValidationError("tolerance must be positive");
    GeneralSchedule g;
    g.profile = variation_profile(psi, opts.profile_depth);
    const double theta = g.profile.theta;
    const std::size_t k = psi.alphabet()->size();

    std::size_t r_max = 0;
    for (std::size_t s = 1, states = k; states <= opts.max_states; ++s, states *= k) r_max = s;

    // r* makes s -> s^2 theta^s and s -> eps_{s,n(s)} decreasing; the second is checked numerically.
    std::size_t r_star = 1;
    if (theta > 0) r_star = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 / -std::log(theta))));
    {
        constexpr std::size_t kCheck = 64;
        std::vector<double> e(kCheck + 1);
        for (std::size_t s = 1; s <= kCheck; ++s) e[s] = epsilon_budget(g.profile, s, schedule_depth(s, opts.delta), 1, 1).epsilon;
        std::size_t start = kCheck;
        while (start > 1 && e[start - 1] >= e[start]) --start;
        r_star = std::max(r_star, start);
    }
    g.r_star = r_star;

    double best = kInf;
    for (std::size_t r = r_star; r <= r_max; ++r) {
        const double norm = approximant_norm(psi, r, opts.limits);
        const auto consts = pushforward_constants(k, norm, g.profile.s_psi);
        const double D1 = budget_D1(k, g.profile.s_psi, norm);
        const double D = budget_D(g.profile.s_psi, D1);
        const double lb = limit_bar(g.profile, consts, r, opts.delta, D1, D);
        best = std::min(best, lb);
        if (lb <= tol / 2) {
            g.r = r;
            g.limit_bar = lb;
            g.psi_norm = norm;
            g.constants = consts;
            g.epsilon = lb == 0 ? 0.0 : epsilon_budget(g.profile, r, schedule_depth(r, opts.delta), D1, D).epsilon;
            break;
        }
    }
    if (g.r == 0)
        throw BudgetError("tolerance unreachable with at most " + std::to_string(opts.max_states) +
                              " transfer states (r* = " + std::to_string(r_star) + ")",
                          2.0 * best);

    // Smallest depth whose exact-r bar fits the other half of the tolerance.
    std::size_t n = g.r + 1;
    if (theta > 0) {
        const double rr = static_cast<double>(g.r);
        const double need = rr * std::log(tol / 2 / (g.constants.C * rr * rr)) / std::log(theta);
        if (need > 1e7) throw BudgetError("truncation depth beyond 1e7", kInf);
        n = std::max(n, static_cast<std::size_t>(std::max(0.0, std::ceil(need))));
        while (induced_error_bar(g.constants, g.r, n) > tol / 2) ++n;
    } else {
        while (induced_error_bar(g.constants, g.r, n) > tol / 2) ++n;
    }
    g.n = n;
    g.exact_bar = induced_error_bar(g.constants, g.r, n);
    return g;
}

PushforwardMeasure schedule_measure(const VariationBoundedPotential& psi, const AmalgamationMap& map,
                                    const GeneralSchedule& g, const GeneralOptions& opts) {
    if (!same_alphabet(psi.alphabet(), map.source()))
        throw ValidationError("potential alphabet differs from the amalgamation source");
    PushforwardOptions po;
    po.perron = opts.perron;
    po.psi_norm = g.psi_norm;
    po.s_psi = g.profile.s_psi;
    po.limits = opts.limits;
    return PushforwardMeasure(approximant(psi, g.r, opts.limits), map, po);
}

InducedValue induced_on_schedule(const PushforwardMeasure& pf, const GeneralSchedule& g, const Word& b,
                                 double tol, double delta) {
    if (pf.range() != g.r) throw ValidationError("pushforward range differs from the schedule");
    InducedValue v = induced_potential_exact_r(pf, b.periodic_extension(std::max(b.size(), g.n + 1)), g.n);
    v.word = b.to_string();
    v.exact_bar = v.error_bar;
    v.limit_bar = g.limit_bar;
    v.error_bar = v.exact_bar + v.limit_bar;
    v.epsilon = g.epsilon;
    v.tol = tol;
    v.delta = delta;
    v.r_star = g.r_star;
    return v;
}

InducedValue induced_potential_general(const VariationBoundedPotential& psi, const AmalgamationMap& map,
                                       const Word& b, double tol, const GeneralOptions& opts) {
    const GeneralSchedule g = plan_general(psi, tol, opts);
    return induced_on_schedule(schedule_measure(psi, map, g, opts), g, b, tol, opts.delta);
}

double certified_variation_bound(const PushforwardMeasure& pf, std::size_t n) {
    const double G = pf.phi_range();
    if (n <= pf.range()) return G;
    return std::min(G, 2.0 * induced_error_bar(pf.constants(), pf.range(), n));
}

std::vector<VariationRow> variation_report(const PushforwardMeasure& pf, std::size_t n_max, std::size_t depth,
                                           const EnumerationLimits& lim) {
    const std::size_t kb = pf.family().target_card(), len = n_max + 2;
    if (depth <= pf.range()) throw ValidationError("evaluation depth must exceed r");
    const unsigned long long count = word_count(kb, len, lim);
    std::vector<double> phi(count);
    std::vector<Symbol> w(len), ext(depth + 1);
    for (unsigned long long i = 0; i < count; ++i) {
        unrank(i, kb, w);
        for (std::size_t j = 0; j <= depth; ++j) ext[j] = w[j % len];
        const TailVector tv = tail_vector(pf, ext, depth);
        phi[i] = ansatz_value(pf, ext, tv.vector);
    }
    const double eval_bar = induced_error_bar(pf.constants(), pf.range(), depth);
    std::vector<VariationRow> rows;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const std::size_t block = ipow(kb, len - n - 1);
        double v = 0.0;
        for (std::size_t s = 0; s < count; s += block) {
            const auto [lo, hi] = std::minmax_element(phi.begin() + s, phi.begin() + s + block);
            v = std::max(v, *hi - *lo);
        }
        rows.push_back({n, v, certified_variation_bound(pf, n), 2.0 * eval_bar});
    }
    return rows;
}

PushforwardGibbsReport gibbs_check_pushforward(const PushforwardMeasure& pf, std::size_t n_max, std::size_t depth,
                                               const EnumerationLimits& lim) {
    constexpr double kSlack = 1e-9;
    const std::size_t kb = pf.family().target_card(), r = pf.range();
    if (depth <= r) throw ValidationError("evaluation depth must exceed r");
    const double G = pf.phi_range();
    const double e_eval = induced_error_bar(pf.constants(), r, depth);
    PushforwardGibbsReport rep;
    double widen = 0.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        // log nu[b_0^n] telescopes into n+1 finite-depth ratios; depth d = n - j differs from
        // phi_r by at most G, and by C r^2 theta^{d/r} once d > r.
        widen += n > r ? std::min(G, induced_error_bar(pf.constants(), r, n)) : G;
        const double log_C = widen + static_cast<double>(n + 1) * e_eval;
        rep.log_C = log_C;
        const std::size_t len = n + 1;
        const unsigned long long count = word_count(kb, len, lim);
        std::vector<double> phi(count);
        std::vector<Symbol> w(len), ext(depth + 1);
        for (unsigned long long i = 0; i < count; ++i) {
            unrank(i, kb, w);
            for (std::size_t j = 0; j <= depth; ++j) ext[j] = w[j % len];
            phi[i] = ansatz_value(pf, ext, tail_vector(pf, ext, depth).vector);
        }
        double lo = kInf, hi = -kInf;
        std::vector<Symbol> rot(len);
        for (unsigned long long i = 0; i < count; ++i) {
            unrank(i, kb, w);
            double S = 0.0;
            for (std::size_t j = 0; j < len; ++j) {
                for (std::size_t t = 0; t < len; ++t) rot[t] = w[(j + t) % len];
                S += phi[rank_of(rot, kb)];
            }
            const double lr = pf.log_prob(w) - S;
            lo = std::min(lo, lr);
            hi = std::max(hi, lr);
            if (std::abs(lr) > log_C + kSlack) {
                if (!rep.first_violation) rep.first_violation = Word(pf.map().target(), w).to_string();
                ++rep.violations;
            }
        }
        rep.words_checked += count;
        rep.min_log_ratio_by_n.push_back(lo);
        rep.max_log_ratio_by_n.push_back(hi);
    }
    return rep;
}

}  // namespace hmg
