#include <gtest/gtest.h>

#include <cmath>

#include <hmgibbs/markov.hpp>
#include <hmgibbs/numeric.hpp>

#include "fixtures.hpp"

using namespace hmg;
using namespace hmg::testing;

TEST(Transfer, RangeOneIsTheWeightMatrix) {
    const auto A = A2();
    const LocallyConstantPotential p(A, 1, {std::log(1.0), std::log(2.0), std::log(3.0), std::log(4.0)});
    const auto t = build_transfer(p);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(t.matrix.value(i, j), 1.0 + 2 * i + j, 1e-14);
}

TEST(Transfer, DeBruijnPattern) {
    const auto A = A2();
    const auto t = build_transfer(LocallyConstantPotential(A, 2, std::vector<double>(8, 0.0)));
    ASSERT_EQ(t.matrix.rows(), 4u);
    for (std::size_t v = 0; v < 4; ++v) {
        int nz = 0;
        for (std::size_t w = 0; w < 4; ++w) {
            const bool overlap = (v % 2) == w / 2;
            EXPECT_EQ(t.matrix.value(v, w), overlap ? 1.0 : 0.0);
            nz += t.matrix(v, w) != 0;
        }
        EXPECT_EQ(nz, 2);
    }
    for (std::size_t r = 1; r <= 4; ++r)
        EXPECT_EQ(primitivity_index(build_transfer(random_potential(A3(), r, r)).matrix), r);
}

TEST(Measure, UniformBernoulli) {
    const auto A = A2();
    const auto m = measure_from(LocallyConstantPotential(A, 1, std::vector<double>(4, std::log(0.5))));
    EXPECT_NEAR(m.perron().rho, 1.0, 1e-14);
    for (const auto& w : enumerate_words(A, 5)) EXPECT_NEAR(cylinder_log_prob(m, w), 5 * std::log(0.5), 1e-13);
    EXPECT_NEAR(measure_from(LocallyConstantPotential(A3(), 1, std::vector<double>(9, 0.0))).pressure(), std::log(3.0),
                1e-14);
}

TEST(Measure, StochasticChain) {
    const auto A = A3();
    const auto Q = random_stochastic(3, 8);
    const auto m = measure_from(chain_potential(A, Q));
    const auto pi = oracle::oracle_stationary(Q);
    EXPECT_NEAR(m.pressure(), 0.0, 1e-12);
    const auto w = Word::parse(A, "011");
    EXPECT_NEAR(cylinder_log_prob(m, w), std::log(pi[0] * Q[0][1] * Q[1][1]), 1e-10);
    for (const auto& v : enumerate_words(A, 4)) {
        double expect = std::log(pi[v[0]]);
        for (int i = 0; i < 3; ++i) expect += std::log(Q[v[i]][v[i + 1]]);
        EXPECT_NEAR(cylinder_log_prob(m, v), expect, 1e-10);
    }
}

TEST(Measure, ConsistencyShiftInvarianceNormalization) {
    const auto A = A3();
    for (std::size_t r : {1u, 2u, 3u}) {
        const auto m = measure_from(random_potential(A, r, 40 + r));
        for (std::size_t n = 1; n <= 7; ++n) {
            std::vector<double> all;
            for (const auto& w : enumerate_words(A, n)) {
                const double lw = cylinder_log_prob(m, w);
                all.push_back(lw);
                std::vector<double> right, left;
                for (Symbol a = 0; a < 3; ++a) {
                    right.push_back(cylinder_log_prob(m, w.concat(Word(A, {a}))));
                    left.push_back(cylinder_log_prob(m, Word(A, {a}).concat(w)));
                }
                EXPECT_NEAR(logsumexp(right), lw, 1e-10);
                EXPECT_NEAR(logsumexp(left), lw, 1e-10);
            }
            EXPECT_NEAR(logsumexp(all), 0.0, 1e-9);
        }
    }
}

TEST(Measure, MatchesOracleParryFormula) {
    const auto A = A3();
    for (std::size_t r : {1u, 2u}) {
        const auto p = random_potential(A, r, 70 + r, -2, 2);
        const auto m = measure_from(p);
        const auto tp = to_oracle(p);
        const auto eig = oracle::dense_perron(oracle::transfer_matrix(tp));
        EXPECT_NEAR(m.perron().rho, eig.rho, 1e-10 * eig.rho);
        for (const auto& w : enumerate_words(A, 5)) EXPECT_NEAR(cylinder_log_prob(m, w), oracle::oracle_parry_log_prob(tp, eig, w), 1e-10);
    }
}

TEST(Pressure, PeriodicAndTrace) {
    const auto A = A2();
    const LocallyConstantPotential z(A, 1, std::vector<double>(4, 0.0));
    for (std::size_t n = 1; n <= 8; ++n) EXPECT_NEAR(pressure_periodic(z, n), std::log(2.0), 1e-14);
    const LocallyConstantPotential m21(A, 1, {std::log(2.0), 0.0, 0.0, std::log(2.0)});
    // Trace(M^12) = 3^12 + 1.
    const double exact = std::log(std::pow(3.0, 12) + 1) / 12;
    EXPECT_NEAR(pressure_periodic(m21, 12), exact, 1e-14);
    EXPECT_NEAR(pressure_trace(m21, 12), exact, 1e-14);
    EXPECT_NEAR(exact - std::log(3.0), 1.5683e-7, 1e-10);
    const auto s = chain_potential(A3(), random_stochastic(3, 2));
    for (std::size_t n : {4u, 8u, 12u}) EXPECT_NEAR(pressure_periodic(s, n), pressure_trace(s, n), 1e-12);
    EXPECT_LT(std::abs(pressure_trace(s, 12)), 1e-3);
}

TEST(Periodic, UniformIsExactAndEnumerationAgrees) {
    const auto A = A2();
    const LocallyConstantPotential u(A, 1, std::vector<double>(4, 0.0));
    EXPECT_NEAR(periodic_measure(u, 10, Word::parse(A, "011")), 0.125, 1e-15);
    const auto p = random_potential(A, 1, 12);
    const auto tp = to_oracle(p);
    for (std::size_t n = 1; n <= 4; ++n)
        for (const auto& w : enumerate_words(A, n))
            EXPECT_NEAR(periodic_measure(p, 10, w), oracle::oracle_cylinder(tp, w, 10), 1e-12);
}

TEST(Gibbs, BernoulliRatiosAreOne) {
    const auto m = measure_from(LocallyConstantPotential(A3(), 1, std::vector<double>(9, 0.0)));
    const auto rep = gibbs_inequality_check(m, 6);
    EXPECT_EQ(rep.violations, 0u);
    EXPECT_NEAR(rep.min_log_ratio, 0.0, 1e-12);
    EXPECT_NEAR(rep.max_log_ratio, 0.0, 1e-12);
}

TEST(Gibbs, NormalizationCancels) {
    const auto p = random_potential(A3(), 2, 5);
    const auto a = gibbs_inequality_check(measure_from(p), 8);
    const auto b = gibbs_inequality_check(measure_from(normalize(p, 0.8)), 8);
    EXPECT_EQ(a.violations, 0u);
    EXPECT_NEAR(a.min_log_ratio, b.min_log_ratio, 1e-10);
    EXPECT_NEAR(a.max_log_ratio, b.max_log_ratio, 1e-10);
    // The closed-form constant uses the sup norm, which the shift does change.
    EXPECT_EQ(b.violations, 0u);
}

TEST(Gibbs, StochasticChainWithinConstant) {
    const auto m = measure_from(chain_potential(A3(), random_stochastic(3, 17)));
    const auto rep = gibbs_inequality_check(m, 10);
    EXPECT_EQ(rep.violations, 0u);
    EXPECT_GE(m.log_gibbs_constant(), 0.0);
    EXPECT_LE(rep.max_log_ratio, m.log_gibbs_constant());
    EXPECT_GE(rep.min_log_ratio, -m.log_gibbs_constant());
}

TEST(Periodic, D0IsFiniteForPositiveTables) {
    const auto t = build_transfer(random_potential(A2(), 2, 1));
    const double d0 = periodic_D0(t);
    EXPECT_GT(d0, 0.0);
    EXPECT_TRUE(std::isfinite(d0));
}
