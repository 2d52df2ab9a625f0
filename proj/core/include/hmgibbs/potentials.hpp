#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "hmgibbs/symbolic.hpp"

namespace hmg {

/// (r+1)-symbol potential: a log-weight per window in A^{r+1}, indexed by window rank.
class LocallyConstantPotential {
public:
    LocallyConstantPotential(AlphabetPtr alphabet, std::size_t r, std::vector<double> table,
                             double approx_error = 0.0);
    /// Every word of A^{r+1} must appear exactly once.
    static LocallyConstantPotential from_entries(AlphabetPtr alphabet, std::size_t r,
                                                 const std::vector<std::pair<Word, double>>& entries);

    const AlphabetPtr& alphabet() const noexcept { return alphabet_; }
    std::size_t range() const noexcept { return r_; }
    std::size_t card() const noexcept { return alphabet_->size(); }
    const std::vector<double>& table() const noexcept { return table_; }
    double value(Rank window) const { return table_.at(window); }
    /// Value on the first r+1 letters.
    double value(std::span<const Symbol> letters) const;
    double sup_norm() const noexcept { return sup_norm_; }
    double min_value() const noexcept { return min_; }
    double max_value() const noexcept { return max_; }
    /// Recorded sup-distance to the potential this table approximates (0 if exact).
    double approx_error() const noexcept { return approx_error_; }

private:
    AlphabetPtr alphabet_;
    std::size_t r_;
    std::vector<double> table_;
    double sup_norm_ = 0, min_ = 0, max_ = 0;
    double approx_error_;
};

namespace decay {
/// var_n <= C rho^n
struct Holder { double C; double rho; };
/// var_n <= C exp(-c n^gamma)
struct Subexponential { double C; double c; double gamma; };
/// var_n <= C n^{-q}, n >= 1
struct Polynomial { double C; double q; };
/// Summable with no closed-form tail; nothing can be certified beyond the explicit range.
struct Summable {};
/// var_n = 0 for n >= range.
struct LocallyConstant { std::size_t range; };
}  // namespace decay

using DecayClass = std::variant<decay::Holder, decay::Subexponential, decay::Polynomial,
                                decay::Summable, decay::LocallyConstant>;

std::string decay_class_name(const DecayClass& cls);

/// Envelope value of the class at n (+inf for Summable, and for Polynomial at n = 0).
double class_envelope(const DecayClass& cls, std::size_t n);

/// Certified upper bound on sum_{s >= m} s^j env(s), j in {0,1,2}, m >= 1 for Polynomial.
/// Throws CertificationError when the class gives no finite bound.
double class_tail_moment(const DecayClass& cls, std::size_t m, unsigned j);

/// General potential given through its values on periodic points w^∞ and a certified
/// modulus of continuity on cylinders.
class VariationBoundedPotential {
public:
    using Evaluator = std::function<double(const Word&)>;
    using VarBound = std::function<double(std::size_t)>;

    /// Checks var_bound >= 0, nonincreasing and dominated by the class envelope on 0..64.
    VariationBoundedPotential(AlphabetPtr alphabet, Evaluator evaluator, VarBound var_bound,
                              DecayClass decay_class, std::string name = "custom");

    const AlphabetPtr& alphabet() const noexcept { return alphabet_; }
    /// psi(w^∞).
    double evaluate(const Word& w) const { return evaluator_(w); }
    double var_bound(std::size_t n) const { return var_bound_(n); }
    const DecayClass& decay_class() const noexcept { return class_; }
    const std::string& name() const noexcept { return name_; }

private:
    AlphabetPtr alphabet_;
    Evaluator evaluator_;
    VarBound var_bound_;
    DecayClass class_;
    std::string name_;
};

/// psi(a) = sum_k lambda^k f(a_k).
VariationBoundedPotential geometric_tail(AlphabetPtr alphabet, std::vector<double> f,
                                         double lambda = 0.5);

/// Wraps a table as a general potential with exact variations.
VariationBoundedPotential from_locally_constant(const LocallyConstantPotential& pot);

/// r = 1 table with psi(a0 a1) = log weight(a0); the Gibbs measure is Bernoulli(weights).
LocallyConstantPotential first_symbol_weighted(AlphabetPtr alphabet,
                                               const std::vector<double>& weights);

/// Table on A^{r+1} of psi evaluated at periodic extensions; records var_bound(r).
LocallyConstantPotential approximant(const VariationBoundedPotential& psi, std::size_t r,
                                     const EnumerationLimits& lim = {});

double variation(const LocallyConstantPotential& pot, std::size_t n);

/// S_p psi_r on the periodic point w^∞.
double birkhoff_sum_periodic(const LocallyConstantPotential& pot, std::span<const Symbol> w);
double birkhoff_sum_periodic(const LocallyConstantPotential& pot, const Word& w);

struct VariationProfile {
    /// var_0 .. var_N (certified bounds for general potentials, exact for tables).
    std::vector<double> values;
    double s_psi = 0;
    double theta = 0;
    /// Governs everything past values.back().
    DecayClass tail;

    /// Bound on var_s for any s.
    double var(std::size_t s) const;
    /// Certified bound on sum_{s >= m} s^j var_s, j in {0,1,2}.
    double tail_moment(std::size_t m, unsigned j) const;
};

VariationProfile variation_profile(const VariationBoundedPotential& psi, std::size_t N = 64);
VariationProfile variation_profile(const LocallyConstantPotential& pot, std::size_t N = 0);

LocallyConstantPotential normalize(const LocallyConstantPotential& pot, double pressure);

}  // namespace hmg
