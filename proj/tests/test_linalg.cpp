// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "support/testing.hpp"
#include "strgcl/linalg/functions.hpp"
#include "strgcl/linalg/matrix.hpp"
#include "strgcl/linalg/sparse.hpp"
#include "strgcl/random.hpp"

using namespace strgcl;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    DenseMatrix m(r, c);
    for (auto& v : m.values()) v = rng.uniform(-1.0, 1.0);
    return m;
}

} // namespace

TEST(Matrix, StorageIsCacheLineAligned) {
    for (std::size_t n : {1, 3, 7, 33}) {
        const DenseMatrix m(n, n);
        EXPECT_EQ(reinterpret_cast<std::uintptr_t>(m.data()) % 64, 0u);
    }
}

TEST(Matrix, RaggedInitializerIsShapeError) {
    EXPECT_ERROR_KIND((DenseMatrix{{1.0, 2.0}, {3.0}}), ErrorKind::shape);
    EXPECT_ERROR_KIND(DenseMatrix(2, 2, std::vector<double>(3)), ErrorKind::shape);
}

TEST(Matrix, AllFiniteDetectsNanAndInf) {
    DenseMatrix m(2, 2, 1.0);
    EXPECT_TRUE(m.all_finite());
    m(1, 0) = INFINITY;
    EXPECT_FALSE(m.all_finite());
    m(1, 0) = NAN;
    EXPECT_FALSE(m.all_finite());
}

TEST(Gemm, TransposeFlagsMatchExplicitTranspose) {
    Rng rng(5);
    const auto a = random_matrix(4, 3, rng), b = random_matrix(5, 3, rng);
    const auto want = matmul(a, b.transposed());
    EXPECT_LT(max_abs_diff(gemm(a, Trans::no, b, Trans::yes), want), 1e-14);
    EXPECT_LT(max_abs_diff(gemm(a.transposed(), Trans::yes, b.transposed(), Trans::no), want), 1e-14);
    EXPECT_ERROR_KIND(matmul(a, b), ErrorKind::shape);
}

TEST(Sparse, RejectsMalformedCsr) {
    EXPECT_ERROR_KIND(SparseCSR(2, 2, {0, 1}, {0}, {1.0}), ErrorKind::shape);          // short row_ptr
    EXPECT_ERROR_KIND(SparseCSR(2, 2, {0, 2, 1}, {0, 1}, {1, 1}), ErrorKind::shape);   // decreasing
    EXPECT_ERROR_KIND(SparseCSR(1, 2, {0, 1}, {2}, {1.0}), ErrorKind::shape);          // column range
    EXPECT_ERROR_KIND(SparseCSR(1, 3, {0, 2}, {1, 1}, {1, 1}), ErrorKind::shape);      // duplicate
    EXPECT_ERROR_KIND(SparseCSR(1, 3, {0, 2}, {1, 0}, {1, 1}), ErrorKind::shape);      // unsorted
}

TEST(Sparse, SpmmAgreesWithDenseProduct) {
    Rng rng(11);
    DenseMatrix d = random_matrix(6, 5, rng);
    for (auto& v : d.values())
        if (std::abs(v) < 0.5) v = 0.0;
    const SparseCSR s = SparseCSR::from_dense(d);
    const auto b = random_matrix(5, 3, rng), c = random_matrix(6, 3, rng);
    EXPECT_LT(max_abs_diff(spmm(s, b), matmul(d, b)), 1e-14);
    EXPECT_LT(max_abs_diff(spmm_transposed(s, c), matmul(d.transposed(), c)), 1e-14);
    EXPECT_EQ(s.transposed().densify(), d.transposed());
    EXPECT_EQ(s.transposed().transposed(), s);
}

TEST(Functions, RowNormalizeKeepsZeroRows) {
    const DenseMatrix m{{3.0, 4.0}, {0.0, 0.0}};
    const DenseMatrix z = row_normalize(m);
    EXPECT_DOUBLE_EQ(z(0, 0), 0.6);
    EXPECT_DOUBLE_EQ(z(0, 1), 0.8);
    EXPECT_EQ(z(1, 0), 0.0);
    EXPECT_EQ(z(1, 1), 0.0);
}

TEST(Functions, CosineMatrixIsSymmetricWithUnitDiagonal) {
    Rng rng(3);
    const DenseMatrix c = cosine_similarity_matrix(random_matrix(5, 4, rng));
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(c(i, i), 1.0, 1e-14);
        for (std::size_t j = 0; j < 5; ++j) {
            EXPECT_NEAR(c(i, j), c(j, i), 1e-15);
            EXPECT_LE(std::abs(c(i, j)), 1.0 + 1e-14);
        }
    }
}

TEST(Functions, LogDomainViolationIsReported) {
    const DenseMatrix m{{1.0, -1.0}};
    EXPECT_ERROR_KIND(elementwise(m, UnaryFn::log()), ErrorKind::numeric_domain);
    EXPECT_ERROR_KIND(elementwise(DenseMatrix{{-2.0}}, UnaryFn::log1p()), ErrorKind::numeric_domain);
}

TEST(Functions, SigmoidIsStableAtExtremes) {
    EXPECT_EQ(sigmoid(-800.0), 0.0);
    EXPECT_EQ(sigmoid(800.0), 1.0);
    EXPECT_NEAR(sigmoid(0.0), 0.5, 0.0);
}

TEST(Functions, CovarianceOfCenteredData) {
    const DenseMatrix x{{1.0, 2.0}, {3.0, 2.0}, {5.0, 2.0}};
    const DenseMatrix c = covariance(x);
    EXPECT_NEAR(c(0, 0), 4.0, 1e-14);
    EXPECT_NEAR(c(1, 1), 0.0, 1e-14);
    EXPECT_NEAR(c(0, 1), 0.0, 1e-14);
    EXPECT_ERROR_KIND(covariance(DenseMatrix{{1.0, 2.0}}), ErrorKind::insufficient_samples);
}

TEST(Random, StreamsAreReproducibleAndDistinct) {
    Rng a(derive_seed(7, 1)), b(derive_seed(7, 1)), c(derive_seed(7, 2));
    for (int i = 0; i < 4; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        EXPECT_NE(x, c.next_u64());
    }
    Rng r(1);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_LT(r.below(7), 7u);
    }
}
