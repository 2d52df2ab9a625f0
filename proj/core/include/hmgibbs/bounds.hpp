#pragma once

#include <string>

#include "hmgibbs/potentials.hpp"

namespace hmg {

/// Constants of the hidden-process estimates for given |A|, ||psi|| and s_psi.
struct PushforwardConstants {
    double theta = 0;
    double s_psi = 0;
    double psi_norm = 0;
    double C0 = 0;
    /// +inf when theta = 0; truncation_error() then uses the unsimplified bound.
    double C1 = 0;
    double C = 0;
};

PushforwardConstants pushforward_constants(std::size_t card, double psi_norm, double s_psi);

/// Hilbert-distance bound between the depth-n tail vector and its limit (n > r).
double truncation_error(const PushforwardConstants& k, std::size_t r, std::size_t n);
/// |phi_r - finite-n log ratio| bound: twice the truncation error.
double induced_error_bar(const PushforwardConstants& k, std::size_t r, std::size_t n);

struct ErrorBudget {
    std::size_t r = 0, n = 0;
    double epsilon = 0;
    double D = 0, D1 = 0;
    double theta = 0, s_psi = 0;
    /// sum_{s>=r} [(n + (s+1)(s+2)) var_s + s theta^s]
    double tail_terms = 0;
    /// sum_{s>=r} var_s, sum_{s>=r} (s+1)(s+2) var_s, sum_{s>=r} s theta^s
    double V0 = 0, V2 = 0, Theta = 0;
};

double budget_D1(std::size_t card, double s_psi, double psi_norm);
double budget_D(double s_psi, double D1);

/// epsilon_{r,n} with explicit partial sums and closed-form tails.
ErrorBudget epsilon_budget(const VariationProfile& profile, std::size_t r, std::size_t n, double D1, double D);

/// sum_{s>=r} s theta^s in closed form.
double theta_moment(double theta, std::size_t r);

/// Log-ratio envelope between periodic-point and Markov measures of a word of length n.
double periodic_envelope_D1(std::size_t r, std::size_t n, std::size_t p, double D1, double s_psi, double theta);
double periodic_envelope_D0(std::size_t r, std::size_t n, std::size_t p, double D0, double tau);

double pressure_gap_bound(const VariationProfile& profile, std::size_t r);

/// n(r) = max(r + 1, ceil(r^{1+delta})).
std::size_t schedule_depth(std::size_t r, double delta);

/// Bound on sup |phi - phi_r| along the schedule; 0 when var_s = 0 for all s >= r.
double limit_bar(const VariationProfile& profile, const PushforwardConstants& k, std::size_t r,
                 double delta, double D1, double D);

struct DecayCertificate {
    enum class Kind { Exponential, Stretched, Subexponential, Polynomial };
    Kind kind = Kind::Exponential;
    double leading = 0;
    /// Exponential: base in [0,1). Stretched/Subexponential: rate c in exp(-c n^exponent).
    double rate = 0;
    double exponent = 1;
    /// Largest n at which the leading constant was fitted (0 = valid for every n).
    std::size_t horizon = 0;

    double bound(std::size_t n) const;
    std::string kind_name() const;
};

struct CertificateInputs {
    VariationProfile profile;
    PushforwardConstants constants;
    double D1 = 0, D = 0;
    /// Range and global oscillation of phi_r, used for the locally constant class.
    std::size_t r = 1;
    double G = 0;
    double delta = 1.0;
    double polynomial_slack = 0.5;
    std::size_t horizon = 2000;
};

/// Locally constant: exact exponential envelope. Other classes: leading constant fitted
/// numerically over n <= horizon (diagnostic). Throws CertificationError for Summable
/// and for Polynomial with q <= 3.
DecayCertificate decay_certificate(const DecayClass& cls, const CertificateInputs& in);

}  // namespace hmg
