#include <gtest/gtest.h>

#include <cmath>

#include <hmgibbs/error.hpp>
#include <hmgibbs/markov.hpp>
#include <hmgibbs/potentials.hpp>

#include "fixtures.hpp"

using namespace hmg;
using namespace hmg::testing;

TEST(LocallyConstant, FromEntriesRequiresEveryWindowOnce) {
    const auto A = A2();
    auto w = [&](const char* s) { return Word::parse(A, s); };
    const auto p = LocallyConstantPotential::from_entries(A, 1, {{w("00"), 0}, {w("01"), 1}, {w("10"), 2}, {w("11"), 3}});
    EXPECT_EQ(p.table(), (std::vector<double>{0, 1, 2, 3}));
    EXPECT_EQ(p.sup_norm(), 3.0);
    EXPECT_THROW(LocallyConstantPotential::from_entries(A, 1, {{w("00"), 0}, {w("01"), 1}, {w("10"), 2}}),
                 ValidationError);
    EXPECT_THROW(LocallyConstantPotential::from_entries(A, 1, {{w("00"), 0}, {w("00"), 1}, {w("10"), 2}, {w("11"), 3}}),
                 ValidationError);
    EXPECT_THROW(LocallyConstantPotential(A, 1, {0, 1, NAN, 0}), ValidationError);
}

TEST(Variation, Examples) {
    const auto A = A2();
    const LocallyConstantPotential c(A, 2, std::vector<double>(8, 0.7));
    for (std::size_t n = 0; n < 5; ++n) EXPECT_EQ(variation(c, n), 0.0);
    // var_0 compares points sharing a_0, so a table driven by the first letter has var_0 = 0.
    const LocallyConstantPotential first(A, 1, {0, 0, 1, 1});
    EXPECT_EQ(variation(first, 0), 0.0);
    const LocallyConstantPotential second(A, 1, {0, 1, 0, 1});
    EXPECT_EQ(variation(second, 0), 1.0);
    EXPECT_EQ(variation(second, 1), 0.0);
}

TEST(Variation, MatchesPairwiseScan) {
    const auto A = A2();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = random_potential(A, 2, seed);
        for (std::size_t n = 0; n <= 3; ++n) {
            double brute = 0;
            for (Rank i = 0; i < 8; ++i)
                for (Rank j = 0; j < 8; ++j) {
                    const auto a = Word::from_rank(A, i, 3), b = Word::from_rank(A, j, 3);
                    bool agree = true;
                    for (std::size_t t = 0; t <= n && t < 3; ++t) agree = agree && a[t] == b[t];
                    if (agree) brute = std::max(brute, std::abs(p.value(i) - p.value(j)));
                }
            EXPECT_DOUBLE_EQ(variation(p, n), brute) << "n=" << n;
        }
    }
}

TEST(Birkhoff, Examples) {
    const auto A = A2();
    const LocallyConstantPotential c(A, 1, std::vector<double>(4, 0.3));
    EXPECT_NEAR(birkhoff_sum_periodic(c, Word::parse(A, "01101")), 1.5, 1e-15);
    const LocallyConstantPotential half(A, 1, std::vector<double>(4, std::log(0.5)));
    EXPECT_NEAR(birkhoff_sum_periodic(half, Word::parse(A, "0111")), 4 * std::log(0.5), 1e-15);
    const LocallyConstantPotential t(A, 1, {0, 1, 2, 3});
    EXPECT_EQ(birkhoff_sum_periodic(t, Word::parse(A, "01")), 3.0);
}

TEST(Birkhoff, RotationInvariantAndNormalizeShifts) {
    const auto A = A3();
    const auto p = random_potential(A, 2, 11);
    const auto w = Word::parse(A, "0121022");
    const double s = birkhoff_sum_periodic(p, w);
    for (std::size_t k = 1; k < w.size(); ++k) {
        const auto rot = w.subword(k, w.size() - 1).concat(w.subword(0, k - 1));
        EXPECT_NEAR(birkhoff_sum_periodic(p, rot), s, 1e-12);
    }
    const auto q = normalize(p, 0.25);
    EXPECT_NEAR(birkhoff_sum_periodic(q, w), s - 7 * 0.25, 1e-12);
    EXPECT_EQ(normalize(p, 0.0).table(), p.table());
}

TEST(Normalize, ZeroTableAndPressure) {
    const auto A = A2();
    const LocallyConstantPotential z(A, 1, std::vector<double>(4, 0.0));
    const auto nz = normalize(z, std::log(2.0));
    for (double x : nz.table()) EXPECT_DOUBLE_EQ(x, -std::log(2.0));
    const auto p = random_potential(A3(), 2, 3);
    const double P = measure_from(p).pressure();
    EXPECT_NEAR(measure_from(normalize(p, P)).pressure(), 0.0, 1e-10);
}

TEST(Approximant, ReproducesTablesAndConstants) {
    const auto p = random_potential(A3(), 2, 5);
    const auto g = from_locally_constant(p);
    EXPECT_EQ(approximant(g, 2).table(), p.table());
    EXPECT_EQ(g.var_bound(2), 0.0);
    const VariationBoundedPotential c(
        A2(), [](const Word&) { return 0.4; }, [](std::size_t) { return 0.0; }, decay::LocallyConstant{1});
    for (std::size_t r = 1; r <= 4; ++r)
    {
        const auto t = approximant(c, r);
        for (double x : t.table()) EXPECT_EQ(x, 0.4);
    }
}

TEST(Approximant, GeometricTailErrorBelowBound) {
    const auto A = A2();
    const auto psi = geometric_tail(A, {0.0, 1.0}, 0.5);
    for (std::size_t r = 1; r <= 5; ++r) {
        const auto t = approximant(psi, r);
        EXPECT_NEAR(psi.var_bound(r), std::ldexp(1.0, -static_cast<int>(r)), 1e-15);
        EXPECT_LE(psi.var_bound(r), std::ldexp(1.0, -static_cast<int>(r) + 1));
        for (std::size_t extra = 1; extra <= 3; ++extra)
            for (const auto& w : enumerate_words(A, r + 1 + extra)) {
                const double err = std::abs(psi.evaluate(w) - t.value(w.subword(0, r).rank()));
                EXPECT_LE(err, psi.var_bound(r) + 1e-15) << w.to_string();
            }
    }
}

TEST(VariationBounded, RejectsBadBounds) {
    auto ev = [](const Word&) { return 0.0; };
    EXPECT_THROW(VariationBoundedPotential(A2(), ev, [](std::size_t n) { return 0.1 * n; }, decay::Summable{}),
                 ValidationError);
    EXPECT_THROW(VariationBoundedPotential(A2(), ev, [](std::size_t n) { return std::pow(0.9, n); },
                                           decay::Holder{1.0, 0.5}),
                 ValidationError);
}

TEST(Profile, LocallyConstantAndConstant) {
    const LocallyConstantPotential second(A2(), 1, {0, 1, 0, 1});
    const auto pr = variation_profile(second);
    EXPECT_DOUBLE_EQ(pr.s_psi, 1.0);
    EXPECT_NEAR(pr.theta, 0.63212055882855767, 1e-15);
    const LocallyConstantPotential c(A2(), 1, std::vector<double>(4, 2.0));
    EXPECT_EQ(variation_profile(c).s_psi, 0.0);
    EXPECT_EQ(variation_profile(c).theta, 0.0);
}

TEST(Profile, HolderTail) {
    const VariationBoundedPotential h(
        A2(), [](const Word&) { return 0.0; }, [](std::size_t n) { return std::ldexp(1.0, -static_cast<int>(n)); },
        decay::Holder{1.0, 0.5});
    const auto pr = variation_profile(h, 10);
    double partial = 0;
    for (int k = 0; k <= 10; ++k) partial += std::ldexp(1.0, -k);
    EXPECT_GE(pr.s_psi, 2.0);
    EXPECT_LE(pr.s_psi, partial + 2 * std::ldexp(1.0, -10) + 1e-15);
    EXPECT_EQ(pr.theta, -std::expm1(-pr.s_psi));
}

TEST(Profile, SummableCannotBeCertified) {
    const VariationBoundedPotential s(
        A2(), [](const Word&) { return 0.0; }, [](std::size_t n) { return 1.0 / ((n + 1.0) * (n + 1.0)); },
        decay::Summable{});
    EXPECT_THROW(variation_profile(s), CertificationError);
}

// Closed-form tails against long partial sums of the envelope.
TEST(TailMoment, DominatesPartialSums) {
    const std::vector<DecayClass> classes{decay::Holder{1.5, 0.7}, decay::Subexponential{2.0, 0.8, 0.5},
                                          decay::Polynomial{1.0, 5.0}};
    for (const auto& cls : classes)
        for (std::size_t m : {1u, 3u, 10u})
            for (unsigned j = 0; j <= 2; ++j) {
                long double s = 0;
                for (std::size_t n = m; n < 200000; ++n) s += std::pow((long double)n, j) * class_envelope(cls, n);
                const double closed = class_tail_moment(cls, m, j);
                EXPECT_GE(closed, static_cast<double>(s) * (1 - 1e-12)) << decay_class_name(cls) << " m=" << m << " j=" << j;
                EXPECT_LE(closed, static_cast<double>(s) * 1.5 + 1e-12) << decay_class_name(cls);
            }
    EXPECT_THROW(class_tail_moment(decay::Polynomial{1.0, 2.5}, 1, 2), CertificationError);
    EXPECT_THROW(class_tail_moment(decay::Summable{}, 1, 0), CertificationError);
    EXPECT_EQ(class_tail_moment(decay::LocallyConstant{3}, 3, 2), 0.0);
}
