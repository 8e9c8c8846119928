// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "support/testing.hpp"
#include "strgcl/losses/losses.hpp"
#include "strgcl/selfcheck.hpp"

using namespace strgcl;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    return selfcheck::detail::random_matrix(r, c, rng);
}

} // namespace

TEST(InfoNce, AgreesWithPerNodeOracle) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const DenseMatrix u = random_matrix(7, 4, s), v = random_matrix(7, 4, s + 100);
        EXPECT_NEAR(infonce(u, v, 0.5), selfcheck::oracle::infonce(u, v, 0.5), 1e-12);
    }
}

TEST(InfoNce, InvariantToRowScaling) {
    const DenseMatrix u = random_matrix(6, 3, 1), v = random_matrix(6, 3, 2);
    DenseMatrix u2 = u;
    for (std::size_t j = 0; j < 3; ++j) u2(2, j) *= 7.5;
    EXPECT_NEAR(infonce(u, v, 0.3), infonce(u2, v, 0.3), 1e-12);
}

TEST(InfoNce, SymmetricInTheTwoViews) {
    const DenseMatrix u = random_matrix(5, 3, 8), v = random_matrix(5, 3, 9);
    EXPECT_NEAR(infonce(u, v, 0.7), infonce(v, u, 0.7), 1e-12);
}

TEST(InfoNce, ErrorPaths) {
    const DenseMatrix u = random_matrix(4, 3, 1);
    EXPECT_ERROR_KIND(infonce(u, u, 0.0), ErrorKind::config);
    EXPECT_ERROR_KIND(infonce(u, u, -1.0), ErrorKind::config);
    EXPECT_ERROR_KIND(infonce(u, random_matrix(4, 2, 1), 0.5), ErrorKind::shape);
    EXPECT_ERROR_KIND(infonce(random_matrix(1, 3, 1), random_matrix(1, 3, 2), 0.5), ErrorKind::insufficient_samples);
}

TEST(RuleLoss, AgreesWithOracle) {
    const DenseMatrix h = random_matrix(9, 4, 3);
    EXPECT_NEAR(rule_loss(h, 0.4), selfcheck::oracle::rule_loss(h, 0.4), 1e-12);
    EXPECT_ERROR_KIND(rule_loss(h, 0.0), ErrorKind::config);
}

TEST(CrossLoss, AgreesWithOracleAndVanishesWhenEqual) {
    const DenseMatrix a = random_matrix(6, 4, 4), b = random_matrix(6, 4, 5);
    EXPECT_NEAR(cross_loss(a, b), selfcheck::oracle::cross_loss(a, b), 1e-12);
    EXPECT_GE(cross_loss(a, b), 0.0);
    EXPECT_NEAR(cross_loss(a, a), 0.0, 1e-15);
    EXPECT_ERROR_KIND(cross_loss(a, random_matrix(5, 4, 1)), ErrorKind::shape);
}

TEST(Total, WeightsCombineTerms) {
    LossBreakdown b;
    b.infonce = 2.0;
    b.rule = 0.5;
    b.cross = 3.0;
    EXPECT_DOUBLE_EQ(total_loss(b, 100.0, 1.0), 2.0 + 50.0 + 3.0);
    EXPECT_DOUBLE_EQ(total_loss(b, 0.0, 0.0), 2.0);
    EXPECT_ERROR_KIND(total_loss(b, -1.0, 1.0), ErrorKind::config);
}
