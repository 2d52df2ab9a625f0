#include "hmgibbs/potentials.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "hmgibbs/error.hpp"
#include "hmgibbs/numeric.hpp"

namespace hmg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t table_size(std::size_t k, std::size_t r) {
    unsigned long long n = 0;
    if (!checked_pow(k, static_cast<unsigned>(r + 1), 1ULL << 40, n))
        throw ValidationError("potential table too large");
    return static_cast<std::size_t>(n);
}

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

LocallyConstantPotential::LocallyConstantPotential(AlphabetPtr alphabet, std::size_t r,
                                                   std::vector<double> table, double approx_error)
    : alphabet_(std::move(alphabet)), r_(r), table_(std::move(table)), approx_error_(approx_error) {
    if (!alphabet_) throw ValidationError("potential without alphabet");
    if (r_ < 1) throw ValidationError("potential range r must be >= 1");
    if (table_.size() != table_size(alphabet_->size(), r_))
        throw ValidationError("potential table must have |A|^(r+1) entries");
    min_ = kInf;
    max_ = -kInf;
    for (double v : table_) {
        if (!std::isfinite(v)) throw ValidationError("potential values must be finite");
        min_ = std::min(min_, v);
        max_ = std::max(max_, v);
    }
    sup_norm_ = std::max(std::abs(min_), std::abs(max_));
}

LocallyConstantPotential LocallyConstantPotential::from_entries(
    AlphabetPtr alphabet, std::size_t r, const std::vector<std::pair<Word, double>>& entries) {
    const std::size_t n = table_size(alphabet->size(), r);
    std::vector<double> table(n, 0.0);
    std::vector<bool> seen(n, false);
    for (const auto& [w, v] : entries) {
        if (!same_alphabet(w.alphabet(), alphabet)) throw ValidationError("entry alphabet mismatch");
        if (w.size() != r + 1)
            throw ValidationError("entry '" + w.to_string() + "' must have length r+1 = " +
                                  std::to_string(r + 1));
        const Rank k = w.rank();
        if (seen[k]) throw ValidationError("duplicate entry '" + w.to_string() + "'");
        seen[k] = true;
        table[k] = v;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!seen[i])
            throw ValidationError("potential table missing word '" +
                                  Word::from_rank(alphabet, i, r + 1).to_string() + "'");
    return LocallyConstantPotential(std::move(alphabet), r, std::move(table));
}

double LocallyConstantPotential::value(std::span<const Symbol> letters) const {
    if (letters.size() < r_ + 1) throw ValidationError("need r+1 letters to evaluate potential");
    return table_[rank_of(letters.first(r_ + 1), alphabet_->size())];
}

std::string decay_class_name(const DecayClass& cls) {
    return std::visit(overloaded{
                          [](const decay::Holder&) { return std::string("holder"); },
                          [](const decay::Subexponential&) { return std::string("subexponential"); },
                          [](const decay::Polynomial&) { return std::string("polynomial"); },
                          [](const decay::Summable&) { return std::string("summable"); },
                          [](const decay::LocallyConstant&) { return std::string("locally-constant"); },
                      },
                      cls);
}

double class_envelope(const DecayClass& cls, std::size_t n) {
    const double x = static_cast<double>(n);
    return std::visit(
        overloaded{
            [&](const decay::Holder& h) { return h.C * std::pow(h.rho, x); },
            [&](const decay::Subexponential& s) { return s.C * std::exp(-s.c * std::pow(x, s.gamma)); },
            [&](const decay::Polynomial& p) { return n == 0 ? kInf : p.C * std::pow(x, -p.q); },
            [&](const decay::Summable&) { return kInf; },
            [&](const decay::LocallyConstant& l) { return n >= l.range ? 0.0 : kInf; },
        },
        cls);
}

double class_tail_moment(const DecayClass& cls, std::size_t m, unsigned j) {
    if (j > 2) throw ValidationError("tail moments are provided for j <= 2");
    const double M = static_cast<double>(m);
    return std::visit(
        overloaded{
            [&](const decay::Holder& h) {
                // sum_{t>=0} (M+t)^j x^{M+t}, expanded into sum t^i x^t closed forms.
                const double x = h.rho, g = 1.0 - x;
                const double s0 = 1.0 / g, s1 = x / (g * g), s2 = x * (1.0 + x) / (g * g * g);
                double poly = s0;
                if (j == 1) poly = M * s0 + s1;
                if (j == 2) poly = M * M * s0 + 2.0 * M * s1 + s2;
                return h.C * std::pow(x, M) * poly;
            },
            [&](const decay::Subexponential& s) {
                // s^j e^{-c s^gamma} decreases for s >= (j/(c gamma))^{1/gamma}; beyond that point
                // the sum is dominated by the integral from one step earlier, which is an upper
                // incomplete gamma function after u = c x^gamma.
                const double peak = j == 0 ? 0.0 : std::pow(j / (s.c * s.gamma), 1.0 / s.gamma);
                const std::size_t start =
                    std::max<std::size_t>({m, static_cast<std::size_t>(std::ceil(peak)) + 1, 1});
                if (start - m > 10'000'000)
                    throw CertificationError("subexponential tail: explicit prefix too long");
                double acc = 0.0;
                for (std::size_t t = m; t < start; ++t) {
                    const double tt = static_cast<double>(t);
                    acc += std::pow(tt, j) * std::exp(-s.c * std::pow(tt, s.gamma));
                }
                const double a = (j + 1.0) / s.gamma;
                const double lo = s.c * std::pow(static_cast<double>(start - 1), s.gamma);
                acc += boost::math::tgamma(a, lo) * std::pow(s.c, -a) / s.gamma;
                return s.C * acc;
            },
            [&](const decay::Polynomial& p) {
                // s^{j-q} decreasing: sum_{s>=m} <= m^{j-q} + int_m^inf x^{j-q} dx.
                if (m == 0) throw CertificationError("polynomial envelope undefined at n = 0");
                const double e = p.q - static_cast<double>(j);
                if (e <= 1.0)
                    throw CertificationError("polynomial tail moment diverges (q - j <= 1)");
                return p.C * (std::pow(M, -e) + std::pow(M, 1.0 - e) / (e - 1.0));
            },
            [&](const decay::Summable&) -> double {
                throw CertificationError("summable class carries no closed-form tail bound");
            },
            [&](const decay::LocallyConstant& l) -> double {
                if (m < l.range)
                    throw CertificationError("locally constant class has no envelope below its range");
                return 0.0;
            },
        },
        cls);
}

VariationBoundedPotential::VariationBoundedPotential(AlphabetPtr alphabet, Evaluator evaluator,
                                                     VarBound var_bound, DecayClass decay_class,
                                                     std::string name)
    : alphabet_(std::move(alphabet)),
      evaluator_(std::move(evaluator)),
      var_bound_(std::move(var_bound)),
      class_(decay_class),
      name_(std::move(name)) {
    if (!alphabet_ || !evaluator_ || !var_bound_)
        throw ValidationError("variation-bounded potential is incomplete");
    std::visit(overloaded{
                   [](const decay::Holder& h) {
                       if (!(h.rho > 0 && h.rho < 1) || !(h.C >= 0))
                           throw ValidationError("holder class needs C >= 0 and rho in (0,1)");
                   },
                   [](const decay::Subexponential& s) {
                       if (!(s.C >= 0 && s.c > 0 && s.gamma > 0))
                           throw ValidationError("subexponential class needs C >= 0, c > 0, gamma > 0");
                   },
                   [](const decay::Polynomial& p) {
                       if (!(p.C >= 0 && p.q > 1))
                           throw ValidationError("polynomial class needs C >= 0 and q > 1");
                   },
                   [](const decay::Summable&) {},
                   [](const decay::LocallyConstant& l) {
                       if (l.range < 1) throw ValidationError("locally constant range must be >= 1");
                   },
               },
               class_);
    double prev = kInf;
    for (std::size_t n = 0; n <= 64; ++n) {
        const double v = var_bound_(n);
        if (!(v >= 0) || !std::isfinite(v))
            throw ValidationError("var_bound(" + std::to_string(n) + ") must be finite and >= 0");
        if (v > prev) throw ValidationError("var_bound must be nonincreasing");
        const double env = class_envelope(class_, n);
        if (v > env * (1 + 1e-12) + 1e-300)
            throw ValidationError("var_bound(" + std::to_string(n) + ") exceeds the " +
                                  decay_class_name(class_) + " envelope");
        prev = v;
    }
}

VariationBoundedPotential geometric_tail(AlphabetPtr alphabet, std::vector<double> f, double lambda) {
    if (f.size() != alphabet->size()) throw ValidationError("geometric tail needs one f value per symbol");
    if (!(lambda > 0 && lambda < 1)) throw ValidationError("geometric tail needs lambda in (0,1)");
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    const double spread = *hi - *lo;
    auto eval = [f, lambda](const Word& w) {
        // Exact on w^∞: one period, then the geometric factor 1/(1 - lambda^p).
        double acc = 0.0, pw = 1.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            acc += f[w[j]] * pw;
            pw *= lambda;
        }
        return acc / (1.0 - pw);
    };
    auto var = [spread, lambda](std::size_t n) {
        return spread * std::pow(lambda, static_cast<double>(n + 1)) / (1.0 - lambda);
    };
    return VariationBoundedPotential(std::move(alphabet), eval, var,
                                     decay::Holder{spread * lambda / (1.0 - lambda), lambda},
                                     "geometric-tail");
}

VariationBoundedPotential from_locally_constant(const LocallyConstantPotential& pot) {
    std::vector<double> vars(pot.range() + 1);
    for (std::size_t n = 0; n <= pot.range(); ++n) vars[n] = variation(pot, n);
    auto eval = [pot](const Word& w) {
        const Word ext = w.periodic_extension(pot.range() + 1);
        return pot.value(ext.letters());
    };
    auto var = [vars](std::size_t n) { return n < vars.size() ? vars[n] : 0.0; };
    return VariationBoundedPotential(pot.alphabet(), eval, var, decay::LocallyConstant{pot.range()},
                                     "table");
}

LocallyConstantPotential first_symbol_weighted(AlphabetPtr alphabet, const std::vector<double>& weights) {
    const std::size_t k = alphabet->size();
    if (weights.size() != k) throw ValidationError("first-symbol weights need one value per symbol");
    std::vector<double> table(k * k);
    for (std::size_t a = 0; a < k; ++a) {
        if (!(weights[a] > 0) || !std::isfinite(weights[a]))
            throw ValidationError("first-symbol weights must be positive");
        for (std::size_t b = 0; b < k; ++b) table[a * k + b] = std::log(weights[a]);
    }
    return LocallyConstantPotential(std::move(alphabet), 1, std::move(table));
}

LocallyConstantPotential approximant(const VariationBoundedPotential& psi, std::size_t r,
                                     const EnumerationLimits& lim) {
    if (r < 1) throw ValidationError("approximant range must be >= 1");
    const auto& A = psi.alphabet();
    const unsigned long long n = word_count(A->size(), r + 1, lim);
    std::vector<double> table(n);
    for (unsigned long long i = 0; i < n; ++i) table[i] = psi.evaluate(Word::from_rank(A, i, r + 1));
    return LocallyConstantPotential(A, r, std::move(table), psi.var_bound(r));
}

double variation(const LocallyConstantPotential& pot, std::size_t n) {
    const std::size_t r = pot.range();
    if (n >= r) return 0.0;
    // Words sharing their first n+1 letters occupy contiguous rank blocks of size k^{r-n}.
    std::size_t block = 1;
    for (std::size_t i = 0; i < r - n; ++i) block *= pot.card();
    const auto& t = pot.table();
    double best = 0.0;
    for (std::size_t s = 0; s < t.size(); s += block) {
        const auto [lo, hi] = std::minmax_element(t.begin() + s, t.begin() + s + block);
        best = std::max(best, *hi - *lo);
    }
    return best;
}

double birkhoff_sum_periodic(const LocallyConstantPotential& pot, std::span<const Symbol> w) {
    const std::size_t p = w.size(), r = pot.range(), k = pot.card();
    if (p == 0) throw ValidationError("periodic word must be nonempty");
    const Rank mod = static_cast<Rank>(pot.table().size() / k);
    Rank win = 0;
    for (std::size_t i = 0; i <= r; ++i) win = win * k + w[i % p];
    double acc = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        acc += pot.table()[win];
        win = (win % mod) * k + w[(j + r + 1) % p];
    }
    return acc;
}

double birkhoff_sum_periodic(const LocallyConstantPotential& pot, const Word& w) {
    if (!same_alphabet(w.alphabet(), pot.alphabet())) throw ValidationError("alphabet mismatch");
    return birkhoff_sum_periodic(pot, std::span<const Symbol>(w.letters()));
}

double VariationProfile::var(std::size_t s) const {
    if (s < values.size()) return values[s];
    return class_envelope(tail, s);
}

double VariationProfile::tail_moment(std::size_t m, unsigned j) const {
    double acc = 0.0;
    for (std::size_t s = m; s < values.size(); ++s) acc += std::pow(static_cast<double>(s), j) * values[s];
    return acc + class_tail_moment(tail, std::max(m, values.size()), j);
}

namespace {
VariationProfile finish_profile(std::vector<double> values, DecayClass tail) {
    VariationProfile p;
    p.values = std::move(values);
    p.tail = tail;
    double s = 0.0;
    for (double v : p.values) s += v;
    s += class_tail_moment(tail, p.values.size(), 0);
    p.s_psi = s;
    p.theta = -std::expm1(-s);
    return p;
}
}  // namespace

VariationProfile variation_profile(const VariationBoundedPotential& psi, std::size_t N) {
    if (const auto* lc = std::get_if<decay::LocallyConstant>(&psi.decay_class()))
        N = std::max(N, lc->range);
    std::vector<double> v(N + 1);
    for (std::size_t n = 0; n <= N; ++n) v[n] = psi.var_bound(n);
    return finish_profile(std::move(v), psi.decay_class());
}

VariationProfile variation_profile(const LocallyConstantPotential& pot, std::size_t N) {
    N = std::max(N, pot.range());
    std::vector<double> v(N + 1);
    for (std::size_t n = 0; n <= N; ++n) v[n] = variation(pot, n);
    return finish_profile(std::move(v), decay::LocallyConstant{pot.range()});
}

LocallyConstantPotential normalize(const LocallyConstantPotential& pot, double pressure) {
    if (!std::isfinite(pressure)) throw ValidationError("pressure must be finite");
    std::vector<double> t = pot.table();
    for (double& v : t) v -= pressure;
    return LocallyConstantPotential(pot.alphabet(), pot.range(), std::move(t), pot.approx_error());
}

}  // namespace hmg
