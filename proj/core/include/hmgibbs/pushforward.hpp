#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hmgibbs/bounds.hpp"
#include "hmgibbs/markov.hpp"

namespace hmg {

/// Restrictions of the transfer matrix to fiber coordinates, one block per w in B^{r+1}.
class RestrictedMatrixFamily {
public:
    RestrictedMatrixFamily(const TransferMatrix& base, const AmalgamationMap& map,
                           bool verify_products = true, const EnumerationLimits& lim = {});

    const AmalgamationMap& map() const noexcept { return map_; }
    std::size_t range() const noexcept { return r_; }
    std::size_t target_card() const noexcept { return map_.target()->size(); }
    /// A^r ranks in E_u for u in B^r, ascending.
    const std::vector<Rank>& fiber(Rank u) const { return fibers_.at(u); }
    /// Rank in B^r of pi(v) and the position of v inside that fiber.
    Rank image(Rank v) const { return image_.at(v); }
    std::size_t position(Rank v) const { return position_.at(v); }
    /// Block for w in B^{r+1}, rows E_{w_0^{r-1}}, columns E_{w_1^r}.
    const IndexedMatrix& block(Rank w) const { return blocks_.at(w); }
    std::size_t block_count() const noexcept { return blocks_.size(); }

    bool products_verified() const noexcept { return products_verified_; }
    bool products_positive() const noexcept { return products_positive_; }
    /// Largest contraction coefficient among the B^{2r} length-r block products.
    double max_product_tau() const noexcept { return max_product_tau_; }
    std::size_t products_checked() const noexcept { return products_checked_; }

private:
    AmalgamationMap map_;
    std::size_t r_;
    std::vector<std::vector<Rank>> fibers_;
    std::vector<Rank> image_;
    std::vector<std::size_t> position_;
    std::vector<IndexedMatrix> blocks_;
    bool products_verified_ = false;
    bool products_positive_ = false;
    double max_product_tau_ = 0;
    std::size_t products_checked_ = 0;
};

RestrictedMatrixFamily build_family(const TransferMatrix& transfer, const AmalgamationMap& map,
                                    const EnumerationLimits& lim = {});

struct PushforwardOptions {
    PerronOptions perron;
    /// Overrides for ||psi|| and s_psi when the table approximates a general potential.
    std::optional<double> psi_norm;
    std::optional<double> s_psi;
    bool verify_products = true;
    EnumerationLimits limits;
};

class PushforwardMeasure {
public:
    PushforwardMeasure(const LocallyConstantPotential& pot, const AmalgamationMap& map,
                       const PushforwardOptions& opts = {});

    const MarkovGibbsMeasure& base() const noexcept { return base_; }
    const RestrictedMatrixFamily& family() const noexcept { return family_; }
    const AmalgamationMap& map() const noexcept { return family_.map(); }
    std::size_t range() const noexcept { return family_.range(); }
    const PushforwardConstants& constants() const noexcept { return constants_; }
    double theta() const noexcept { return constants_.theta; }
    double log_rho() const noexcept { return base_.pressure(); }

    /// L and R entries restricted to E_u, u in B^r.
    const std::vector<double>& left(Rank u) const { return left_.at(u); }
    const std::vector<double>& right(Rank u) const { return right_.at(u); }

    /// phi_r takes values in [phi_min, phi_max].
    double phi_min() const noexcept { return phi_lo_; }
    double phi_max() const noexcept { return phi_hi_; }
    double phi_range() const noexcept { return phi_hi_ - phi_lo_; }

    double log_prob(std::span<const Symbol> b) const;

private:
    MarkovGibbsMeasure base_;
    RestrictedMatrixFamily family_;
    PushforwardConstants constants_;
    std::vector<std::vector<double>> left_, right_;
    std::vector<double> log_mass_r_;  // log nu_r[u] for u in B^r
    double phi_lo_ = 0, phi_hi_ = 0;
};

double pushforward_cylinder_log_prob(const PushforwardMeasure& pf, const Word& b);

struct TailVector {
    /// b_1 .. b_n
    std::vector<Symbol> context;
    SimplexVector vector;
    std::size_t n = 0;
    double truncation_error = 0;
};

/// x_{b_1^n}: n - r projective maps applied to the normalized restricted R on E_{b_{n-r+1}^n}.
/// Uses b[1..n], so b.size() >= n + 1.
TailVector tail_vector(const PushforwardMeasure& pf, std::span<const Symbol> b, std::size_t n);

struct InducedValue {
    std::string word;
    double value = 0;
    double error_bar = 0;
    std::size_t r = 0, n = 0;
    /// log(nu_r[b_0^n] / nu_r[b_1^n]) computed from cylinder probabilities.
    double direct_log_ratio = 0;
    PushforwardConstants constants;
    /// Double-limit mode only.
    double exact_bar = 0;
    double limit_bar = 0;
    double epsilon = 0;
    double tol = 0;
    double delta = 0;
    std::size_t r_star = 0;
};

InducedValue induced_potential_exact_r(const PushforwardMeasure& pf, const Word& b, std::size_t n);

struct GeneralOptions {
    double delta = 1.0;
    /// Largest |A|^r allowed for a transfer matrix.
    std::size_t max_states = 1024;
    std::size_t profile_depth = 64;
    PerronOptions perron;
    EnumerationLimits limits;
};

/// Chosen (r, n) and bars for a tolerance; throws BudgetError when out of reach.
struct GeneralSchedule {
    std::size_t r = 0, n = 0, r_star = 0;
    double limit_bar = 0, exact_bar = 0, epsilon = 0;
    double psi_norm = 0;
    VariationProfile profile;
    PushforwardConstants constants;
};

/// max |psi| over A^{r+1} plus var_r psi: the sup-norm bound used for the approximant.
double approximant_norm(const VariationBoundedPotential& psi, std::size_t r, const EnumerationLimits& lim = {});

GeneralSchedule plan_general(const VariationBoundedPotential& psi, double tol, const GeneralOptions& opts = {});

/// Pushforward of the scheduled approximant, with the general-potential constants.
PushforwardMeasure schedule_measure(const VariationBoundedPotential& psi, const AmalgamationMap& map,
                                    const GeneralSchedule& g, const GeneralOptions& opts = {});
/// phi at b from a measure built by schedule_measure; the bar adds the limit term.
InducedValue induced_on_schedule(const PushforwardMeasure& pf, const GeneralSchedule& g, const Word& b,
                                 double tol, double delta);

/// Evaluates the chosen approximant; b is extended periodically to length n + 1.
InducedValue induced_potential_general(const VariationBoundedPotential& psi, const AmalgamationMap& map,
                                       const Word& b, double tol, const GeneralOptions& opts = {});

struct VariationRow {
    std::size_t n = 0;
    double empirical_var = 0;
    double certified_bound = 0;
    double error_bar = 0;
};

/// Empirical var_n phi_r over all B-words of length n_max + 2, each extended periodically
/// and evaluated at depth `depth`.
std::vector<VariationRow> variation_report(const PushforwardMeasure& pf, std::size_t n_max, std::size_t depth,
                                           const EnumerationLimits& lim = {});

/// Certified bound on var_n phi_r: the global range G, sharpened to 2 C r^2 theta^{n/r} when n > r.
double certified_variation_bound(const PushforwardMeasure& pf, std::size_t n);

struct PushforwardGibbsReport {
    double log_C = 0;
    std::vector<double> max_log_ratio_by_n, min_log_ratio_by_n;
    std::size_t words_checked = 0;
    std::size_t violations = 0;
    std::optional<std::string> first_violation;
};

/// Checks nu_r[b] / exp(S_{n+1} phi_r(b^∞)) against the widened Gibbs constant.
PushforwardGibbsReport gibbs_check_pushforward(const PushforwardMeasure& pf, std::size_t n_max, std::size_t depth,
                                               const EnumerationLimits& lim = {});

}  // namespace hmg
