#include <gtest/gtest.h>

#include <cmath>

#include <oracle.hpp>

#include "fixtures.hpp"

using namespace hmg;
using namespace hmg::testing;

TEST(Oracle, BernoulliCylinder) {
    const oracle::TablePotential u{A2(), 1, std::vector<double>(4, 0.0)};
    for (const auto& w : enumerate_words(A2(), 3)) EXPECT_NEAR(oracle::oracle_cylinder(u, w, 9), 0.125, 1e-15);
    EXPECT_THROW(oracle::oracle_cylinder(u, Word::parse(A2(), "01"), 3), std::invalid_argument);
}

TEST(Oracle, PushforwardSingletonAndTotal) {
    const auto A = A3(), B = A2();
    const auto pot = to_oracle(random_potential(A, 2, 8));
    const auto eig = oracle::dense_perron(oracle::transfer_matrix(pot));
    const auto m = merge_12(A, B);
    EXPECT_NEAR(oracle::oracle_pushforward(pot, m, Word::parse(B, "0000")),
                oracle::oracle_parry_log_prob(pot, eig, Word::parse(A, "0000")), 1e-13);
    for (std::size_t n = 1; n <= 6; ++n) {
        double s = 0;
        for (const auto& b : enumerate_words(B, n)) s += std::exp(oracle::oracle_pushforward(pot, m, b));
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Oracle, TransferOverlapRule) {
    const auto pot = to_oracle(random_potential(A2(), 2, 1));
    const auto M = oracle::transfer_matrix(pot);
    ASSERT_EQ(M.size(), 4u);
    for (std::size_t v = 0; v < 4; ++v)
        for (std::size_t w = 0; w < 4; ++w) EXPECT_EQ(M[v][w] > 0, v % 2 == w / 2);
}

TEST(Oracle, Lumpability) {
    const auto A = A3(), B = A2();
    const auto m = merge_12(A, B);
    const Matrix same{{0.2, 0.5, 0.3}, {0.2, 0.5, 0.3}, {0.2, 0.5, 0.3}};
    const auto l1 = oracle::oracle_lumped_chain(same, m);
    ASSERT_TRUE(l1);
    EXPECT_NEAR((*l1)[0][0], 0.2, 1e-15);
    EXPECT_NEAR((*l1)[1][1], 0.8, 1e-15);
    const Matrix uni(3, std::vector<double>(3, 1.0 / 3));
    const auto l2 = oracle::oracle_lumped_chain(uni, m);
    ASSERT_TRUE(l2);
    EXPECT_NEAR((*l2)[0][0], 1.0 / 3, 1e-15);
    EXPECT_NEAR((*l2)[0][1], 2.0 / 3, 1e-15);
    for (std::uint64_t seed = 0; seed < 5; ++seed) EXPECT_FALSE(oracle::oracle_lumped_chain(random_stochastic(3, seed), m));
}

TEST(Oracle, StationaryDistribution) {
    const Matrix Q{{0.9, 0.1}, {0.5, 0.5}};
    const auto pi = oracle::oracle_stationary(Q);
    EXPECT_NEAR(pi[0], 5.0 / 6, 1e-14);
    EXPECT_NEAR(pi[1], 1.0 / 6, 1e-14);
}
