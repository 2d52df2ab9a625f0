#include <gtest/gtest.h>

#include <cmath>

#include <hmgibbs/bounds.hpp>
#include <hmgibbs/error.hpp>

#include "fixtures.hpp"

using namespace hmg;
using namespace hmg::testing;

namespace {

VariationProfile holder_profile(double C, double rho) {
    const VariationBoundedPotential h(
        A2(), [](const Word&) { return 0.0; }, [=](std::size_t n) { return C * std::pow(rho, n); },
        decay::Holder{C, rho});
    return variation_profile(h, 16);
}

}  // namespace

TEST(Budget, LocallyConstantIsPureThetaSeries) {
    const auto pot = random_potential(A3(), 2, 1, -0.2, 0.2);
    const auto prof = variation_profile(pot);
    const double D1 = budget_D1(3, prof.s_psi, pot.sup_norm()), D = budget_D(prof.s_psi, D1);
    const double th = prof.theta;
    for (std::size_t r = 2; r <= 6; ++r) {
        const auto b = epsilon_budget(prof, r, 40, D1, D);
        const double closed = D * std::pow(th, r) * (r * (1 - th) + th) / ((1 - th) * (1 - th));
        long double partial = 0;
        for (std::size_t s = r; s < 5000; ++s) partial += s * std::pow((long double)th, (long double)s);
        EXPECT_NEAR(b.epsilon, closed, 1e-12 * closed);
        EXPECT_NEAR(b.epsilon, D * static_cast<double>(partial), 1e-12 * closed);
        EXPECT_EQ(b.V0, 0.0);
        EXPECT_EQ(b.V2, 0.0);
    }
}

TEST(Budget, ConstantPotentialHasNoBudget) {
    const LocallyConstantPotential c(A2(), 1, std::vector<double>(4, 0.3));
    const auto prof = variation_profile(c);
    EXPECT_EQ(epsilon_budget(prof, 1, 10, 1.0, 2.0).epsilon, 0.0);
}

TEST(Budget, AffineInNAndMonotoneGrid) {
    const auto prof = holder_profile(1.0, 0.5);
    const double D1 = budget_D1(2, prof.s_psi, 1.0), D = budget_D(prof.s_psi, D1);
    for (std::size_t r = 1; r <= 8; ++r) {
        const double e1 = epsilon_budget(prof, r, 1, D1, D).epsilon;
        const double e2 = epsilon_budget(prof, r, 2, D1, D).epsilon;
        const double slope = D * epsilon_budget(prof, r, 1, D1, D).V0;
        EXPECT_NEAR(e2 - e1, slope, 1e-9 * e2);
        for (std::size_t n = 1; n <= 64; ++n) {
            const double e = epsilon_budget(prof, r, n, D1, D).epsilon;
            EXPECT_GE(e, 0.0);
            if (n > 1) EXPECT_GE(e, epsilon_budget(prof, r, n - 1, D1, D).epsilon);
            if (r > 1) EXPECT_LE(e, epsilon_budget(prof, r - 1, n, D1, D).epsilon);
        }
    }
}

TEST(Budget, ThetaMomentClosedForm) {
    for (double th : {0.1, 0.5, 0.9})
        for (std::size_t r : {1u, 4u, 9u}) {
            long double s = 0;
            for (std::size_t k = r; k < 20000; ++k) s += k * std::pow((long double)th, (long double)k);
            EXPECT_NEAR(theta_moment(th, r), static_cast<double>(s), 1e-12 * static_cast<double>(s));
        }
    EXPECT_EQ(theta_moment(0.0, 1), 0.0);
}

TEST(Constants, ClosedForms) {
    const auto k = pushforward_constants(3, 0.7, 0.4);
    EXPECT_NEAR(k.theta, 1 - std::exp(-0.4), 1e-16);
    EXPECT_NEAR(k.C0, 2 * (std::log(3.0) + 0.7), 1e-15);
    EXPECT_NEAR(k.C1, 4 * k.C0 * (1 + std::exp(0.4) * k.theta) / (k.theta * k.theta * (1 - k.theta)), 1e-9);
    EXPECT_EQ(k.C, 2 * k.C1);
    EXPECT_NEAR(induced_error_bar(k, 2, 10), k.C * 4 * std::pow(k.theta, 5.0), 1e-12);
    EXPECT_EQ(induced_error_bar(k, 2, 10), 2 * truncation_error(k, 2, 10));
    EXPECT_NEAR(budget_D1(3, 0.4, 0.7), 4 * (std::log(3.0) + 0.4 + 0.7), 1e-15);
    EXPECT_EQ(budget_D(0.0, 0.1), 2.0);
}

TEST(Constants, ZeroThetaIsFinite) {
    const auto k = pushforward_constants(2, 0.0, 0.0);
    EXPECT_TRUE(std::isinf(k.C));
    // One block of r steps is still uncontracted; from the second on theta^j = 0.
    EXPECT_GT(truncation_error(k, 2, 3), 0.0);
    EXPECT_EQ(truncation_error(k, 2, 4), 0.0);
    EXPECT_EQ(truncation_error(k, 1, 2), 0.0);
}

TEST(PressureGap, Examples) {
    const auto prof = holder_profile(1.0, 0.5);
    for (std::size_t r = 1; r <= 8; ++r) EXPECT_NEAR(pressure_gap_bound(prof, r), std::ldexp(1.0, -static_cast<int>(r)), 1e-16);
    const auto lc = variation_profile(random_potential(A2(), 2, 4));
    EXPECT_EQ(pressure_gap_bound(lc, 2), 0.0);
    EXPECT_EQ(pressure_gap_bound(lc, 5), 0.0);
}

TEST(Schedule, Depth) {
    EXPECT_EQ(schedule_depth(1, 1.0), 2u);
    EXPECT_EQ(schedule_depth(4, 1.0), 16u);
    EXPECT_EQ(schedule_depth(4, 0.5), 8u);
}

TEST(Certificate, ClassExponents) {
    CertificateInputs in;
    in.profile = holder_profile(0.1, 0.5);
    in.constants = pushforward_constants(2, 0.5, in.profile.s_psi);
    in.D1 = budget_D1(2, in.profile.s_psi, 0.5);
    in.D = budget_D(in.profile.s_psi, in.D1);
    in.horizon = 200;
    const auto h = decay_certificate(decay::Holder{0.1, 0.5}, in);
    EXPECT_EQ(h.kind, DecayCertificate::Kind::Stretched);
    EXPECT_DOUBLE_EQ(h.exponent, 0.5);
    EXPECT_GT(h.rate, 0.0);
    for (std::size_t n = 1; n <= 200; n += 7) EXPECT_GT(h.bound(n), 0.0);

    in.profile.tail = decay::Subexponential{0.1, 1.0, 0.5};
    in.delta = 0.5;
    const auto s = decay_certificate(decay::Subexponential{0.1, 1.0, 0.5}, in);
    EXPECT_NEAR(s.exponent, 1.0 / 3, 1e-15);

    in.polynomial_slack = 0.5;
    const auto p = decay_certificate(decay::Polynomial{0.1, 5.0}, in);
    EXPECT_EQ(p.kind, DecayCertificate::Kind::Polynomial);
    EXPECT_DOUBLE_EQ(p.exponent, 2.5);
    EXPECT_THROW(decay_certificate(decay::Polynomial{0.1, 3.0}, in), CertificationError);
    EXPECT_THROW(decay_certificate(decay::Summable{}, in), CertificationError);
}

TEST(Certificate, LocallyConstantIsExponentialInThetaRoot) {
    CertificateInputs in;
    in.profile = variation_profile(random_potential(A3(), 2, 2, -0.3, 0.3));
    in.constants = pushforward_constants(3, 0.3, in.profile.s_psi);
    in.r = 2;
    in.G = 0.5;
    const auto c = decay_certificate(decay::LocallyConstant{2}, in);
    EXPECT_EQ(c.kind, DecayCertificate::Kind::Exponential);
    EXPECT_NEAR(c.rate, std::sqrt(in.constants.theta), 1e-15);
    EXPECT_EQ(c.horizon, 0u);
    for (std::size_t n = 0; n <= 2; ++n) EXPECT_GE(c.bound(n), in.G);
}

TEST(Envelopes, PeriodicEnvelopeShrinksWithPeriod) {
    for (std::size_t p = 8; p < 14; ++p) {
        EXPECT_GT(periodic_envelope_D1(2, 3, p, 5.0, 0.3, 0.25), periodic_envelope_D1(2, 3, p + 1, 5.0, 0.3, 0.25));
        EXPECT_GT(periodic_envelope_D0(2, 3, p, 1.0, 0.5), periodic_envelope_D0(2, 3, p + 1, 1.0, 0.5));
    }
}
