#include "hmgibbs/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmgibbs/error.hpp"

namespace hmg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

PushforwardConstants pushforward_constants(std::size_t card, double psi_norm, double s_psi) {
    PushforwardConstants k;
    k.s_psi = s_psi;
    k.theta = -std::expm1(-s_psi);
    k.psi_norm = psi_norm;
    k.C0 = 2.0 * (std::log(static_cast<double>(card)) + psi_norm);
    if (k.theta > 0) {
        k.C1 = 4.0 * k.C0 * (1.0 + std::exp(s_psi) * k.theta) / (k.theta * k.theta * (1.0 - k.theta));
        k.C = 2.0 * k.C1;
    } else {
        k.C1 = k.C = kInf;
    }
    return k;
}

double truncation_error(const PushforwardConstants& k, std::size_t r, std::size_t n) {
    if (n <= r) throw ValidationError("truncation depth must exceed r");
    const double rr = static_cast<double>(r);
    if (k.theta > 0) return k.C1 * rr * rr * std::pow(k.theta, static_cast<double>(n) / rr);
    // theta = 0: 2r(r+1)C0(e^s theta^r + 1) theta^j (theta^j + 1/(1-theta)), j = floor(n/r) - 1, 0^0 = 1.
    const std::size_t j = n / r - 1;
    return j == 0 ? 4.0 * rr * (rr + 1.0) * k.C0 : 0.0;
}

double induced_error_bar(const PushforwardConstants& k, std::size_t r, std::size_t n) {
    return 2.0 * truncation_error(k, r, n);
}

double budget_D1(std::size_t card, double s_psi, double psi_norm) {
    return 4.0 * (std::log(static_cast<double>(card)) + s_psi + psi_norm);
}

double budget_D(double s_psi, double D1) { return std::max(2.0, 2.0 * std::exp(s_psi) * D1); }

double theta_moment(double theta, std::size_t r) {
    if (theta <= 0) return 0.0;
    const double R = static_cast<double>(r), g = 1.0 - theta;
    return std::pow(theta, R) * (R * g + theta) / (g * g);
}

ErrorBudget epsilon_budget(const VariationProfile& profile, std::size_t r, std::size_t n, double D1, double D) {
    if (!(profile.theta < 1)) throw CertificationError("epsilon budget needs theta < 1");
    ErrorBudget b;
    b.r = r;
    b.n = n;
    b.D1 = D1;
    b.D = D;
    b.theta = profile.theta;
    b.s_psi = profile.s_psi;
    const double T0 = profile.tail_moment(r, 0);
    const double T1 = profile.tail_moment(r, 1);
    const double T2 = profile.tail_moment(r, 2);
    b.V0 = T0;
    b.V2 = T2 + 3.0 * T1 + 2.0 * T0;
    b.Theta = theta_moment(profile.theta, r);
    b.tail_terms = static_cast<double>(n) * b.V0 + b.V2 + b.Theta;
    b.epsilon = D * b.tail_terms;
    return b;
}

double periodic_envelope_D1(std::size_t r, std::size_t n, std::size_t p, double D1, double s_psi, double theta) {
    const double e = (static_cast<double>(p) - static_cast<double>(std::max(n, r))) / r - 2.0;
    if (theta == 0) return 0.0;
    return D1 * r * std::exp(s_psi) * std::pow(theta, e);
}

double periodic_envelope_D0(std::size_t r, std::size_t n, std::size_t p, double D0, double tau) {
    const double e = (static_cast<double>(p) - static_cast<double>(std::max(n, r))) / r - 2.0;
    if (tau == 0) return 0.0;
    return r * D0 / (1.0 - tau) * std::pow(tau, e);
}

double pressure_gap_bound(const VariationProfile& profile, std::size_t r) { return profile.var(r); }

std::size_t schedule_depth(std::size_t r, double delta) {
    if (!(delta > 0)) throw ValidationError("schedule exponent delta must be positive");
    const double n = std::ceil(std::pow(static_cast<double>(r), 1.0 + delta) - 1e-9);
    return std::max<std::size_t>(r + 1, static_cast<std::size_t>(n));
}

double limit_bar(const VariationProfile& profile, const PushforwardConstants& k, std::size_t r, double delta,
                 double D1, double D) {
    if (profile.tail_moment(r, 0) == 0.0) return 0.0;
    const std::size_t n = schedule_depth(r, delta);
    const double eps = epsilon_budget(profile, r, n, D1, D).epsilon;
    const double rr = static_cast<double>(r);
    return 2.0 * (2.0 * eps + k.C * rr * rr * std::pow(k.theta, static_cast<double>(n) / rr));
}

double DecayCertificate::bound(std::size_t n) const {
    const double x = static_cast<double>(n);
    switch (kind) {
        case Kind::Exponential: return leading * (n == 0 ? 1.0 : std::pow(rate, x));
        case Kind::Stretched:
        case Kind::Subexponential: return leading * std::exp(-rate * std::pow(x, exponent));
        case Kind::Polynomial: return n == 0 ? kInf : leading * std::pow(x, -exponent);
    }
    return kInf;
}

std::string DecayCertificate::kind_name() const {
    switch (kind) {
        case Kind::Exponential: return "exponential";
        case Kind::Stretched: return "stretched";
        case Kind::Subexponential: return "subexponential";
        case Kind::Polynomial: return "polynomial";
    }
    return "unknown";
}

namespace {

// For each n <= horizon: min over r < n of 2 limit_bar(r) + 2 C r^2 theta^{n/r}, a bound on var_n phi.
std::vector<double> schedule_bounds(const CertificateInputs& in) {
    const auto& k = in.constants;
    std::vector<double> lim(in.horizon + 1, kInf);
    for (std::size_t r = 1; r < in.horizon; ++r)
        lim[r] = limit_bar(in.profile, k, r, in.delta, in.D1, in.D);
    std::vector<double> B(in.horizon + 1, kInf);
    for (std::size_t n = 2; n <= in.horizon; ++n)
        for (std::size_t r = 1; r < n; ++r) {
            if (!std::isfinite(lim[r])) continue;
            const double rr = static_cast<double>(r);
            const double v = 2.0 * lim[r] + 2.0 * k.C * rr * rr * std::pow(k.theta, n / rr);
            B[n] = std::min(B[n], v);
        }
    return B;
}

double fit_leading(const std::vector<double>& B, const DecayCertificate& shape) {
    double lead = 0.0;
    DecayCertificate unit = shape;
    unit.leading = 1.0;
    for (std::size_t n = 2; n < B.size(); ++n)
        if (std::isfinite(B[n])) lead = std::max(lead, B[n] / unit.bound(n));
    return lead;
}

}  // namespace

DecayCertificate decay_certificate(const DecayClass& cls, const CertificateInputs& in) {
    const auto& k = in.constants;
    DecayCertificate cert;
    return std::visit(
        overloaded{
            [&](const decay::LocallyConstant& lc) {
                // n > r: 2 C r^2 theta^{n/r} = 2 C r^2 vartheta^n. n <= r: G <= G vartheta^{n-r}.
                const double r = static_cast<double>(lc.range);
                cert.kind = DecayCertificate::Kind::Exponential;
                cert.rate = std::pow(k.theta, 1.0 / r);
                cert.leading = k.theta > 0 ? std::max(2.0 * k.C * r * r, in.G * std::pow(cert.rate, -r)) : in.G;
                cert.horizon = 0;
                return cert;
            },
            [&](const decay::Holder& h) {
                cert.kind = DecayCertificate::Kind::Stretched;
                cert.exponent = std::min(1.0, in.delta) / (1.0 + in.delta);
                cert.rate = -std::log(std::sqrt(std::max(h.rho, k.theta)));
                cert.horizon = in.horizon;
                cert.leading = fit_leading(schedule_bounds(in), cert);
                return cert;
            },
            [&](const decay::Subexponential& s) {
                cert.kind = DecayCertificate::Kind::Subexponential;
                cert.exponent = s.gamma / (1.0 + s.gamma);
                cert.rate = std::min(s.c, -std::log(k.theta)) / 2.0;
                cert.horizon = in.horizon;
                CertificateInputs sched = in;
                sched.delta = s.gamma;
                cert.leading = fit_leading(schedule_bounds(sched), cert);
                return cert;
            },
            [&](const decay::Polynomial& p) {
                if (p.q <= 3.0)
                    throw CertificationError("polynomial decay with q <= 3: no certificate for the induced potential");
                if (!(in.polynomial_slack > 0 && in.polynomial_slack < p.q - 3.0))
                    throw ValidationError("polynomial slack must lie in (0, q-3)");
                cert.kind = DecayCertificate::Kind::Polynomial;
                cert.exponent = p.q - 2.0 - in.polynomial_slack;
                cert.horizon = in.horizon;
                CertificateInputs sched = in;
                sched.delta = (p.q - 1.0) / (p.q - 1.0 - in.polynomial_slack) - 1.0;
                cert.leading = fit_leading(schedule_bounds(sched), cert);
                return cert;
            },
            [&](const decay::Summable&) -> DecayCertificate {
                throw CertificationError("summable class without closed-form tail: no decay certificate");
            },
        },
        cls);
}

}  // namespace hmg
