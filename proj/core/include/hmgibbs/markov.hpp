#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hmgibbs/potentials.hpp"
#include "hmgibbs/projective.hpp"

namespace hmg {

/// Transfer matrix over A^r: state v goes to (v k + c) mod k^r with weight exp(psi(v c)).
struct TransferMatrix {
    LocallyConstantPotential potential;
    IndexedMatrix matrix;
    std::size_t r;
};

TransferMatrix build_transfer(const LocallyConstantPotential& pot);

/// Parry measure of an (r+1)-symbol potential.
class MarkovGibbsMeasure {
public:
    MarkovGibbsMeasure(TransferMatrix transfer, PerronData perron);

    const TransferMatrix& transfer() const noexcept { return transfer_; }
    const LocallyConstantPotential& potential() const noexcept { return transfer_.potential; }
    const PerronData& perron() const noexcept { return perron_; }
    std::size_t range() const noexcept { return transfer_.r; }
    double pressure() const noexcept { return perron_.log_rho; }
    double gibbs_constant() const noexcept { return std::exp(log_gibbs_constant_); }
    double log_gibbs_constant() const noexcept { return log_gibbs_constant_; }
    /// log L and log R indexed by the rank of a word in A^r.
    const std::vector<double>& log_left() const noexcept { return log_L_; }
    const std::vector<double>& log_right() const noexcept { return log_R_; }

    double log_prob(std::span<const Symbol> w) const;

private:
    TransferMatrix transfer_;
    PerronData perron_;
    std::vector<double> log_L_, log_R_;
    double log_gibbs_constant_ = 0;
};

MarkovGibbsMeasure measure_from(const LocallyConstantPotential& pot, const PerronOptions& opts = {});

/// Natural-log cylinder probability; words shorter than r sum over their completions.
double cylinder_log_prob(const MarkovGibbsMeasure& m, const Word& w);

/// (1/n) log sum over Per_n of exp(S_n psi), by enumeration.
double pressure_periodic(const LocallyConstantPotential& pot, std::size_t n,
                         const EnumerationLimits& lim = {});
/// (1/n) log Trace(M^n).
double pressure_trace(const LocallyConstantPotential& pot, std::size_t n);

/// log of the periodic-point measure of [w] at period p > |w| + r, via matrix powers.
double periodic_log_measure(const LocallyConstantPotential& pot, std::size_t p, const Word& w);
double periodic_measure(const LocallyConstantPotential& pot, std::size_t p, const Word& w);

/// 2 max_zeta delta(M^r e_zeta, M^{r+1} e_zeta).
double periodic_D0(const TransferMatrix& t);

struct GibbsReport {
    double log_C = 0;
    double min_log_ratio = 0;
    double max_log_ratio = 0;
    /// Per length n+1 = 1..n_max+1: extremal log ratios.
    std::vector<double> min_by_n, max_by_n;
    std::size_t words_checked = 0;
    std::size_t violations = 0;
    std::optional<std::string> first_violation;
};

/// Exhaustive check of exp(-C) <= mu[w] / exp(S_{n+1} psi(w^∞) - (n+1) P) <= exp(C).
GibbsReport gibbs_inequality_check(const MarkovGibbsMeasure& m, std::size_t n_max,
                                   const EnumerationLimits& lim = {});

}  // namespace hmg
