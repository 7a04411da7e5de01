#include <gtest/gtest.h>

#include <random>

#include "serinv/error.hpp"
#include "serinv/kernels.hpp"

using namespace serinv;

namespace {

Block random_block(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Block x(r, c);
    for (double& v : x.values()) v = u(rng);
    return x;
}

Block random_spd(std::mt19937_64& rng, std::size_t n) {
    Block m = random_block(rng, n, n);
    Block s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += m(i, k) * m(j, k);
            s(i, j) = acc + (i == j ? static_cast<double>(n) : 0.0);
        }
    return s;
}

Block random_lower(std::mt19937_64& rng, std::size_t n) {
    Block l = random_block(rng, n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) l(i, j) = 0.0;
        l(i, i) = 2.0 + std::abs(l(i, i));
    }
    return l;
}

Block naive(const Block& a, const Block& b) {
    Block c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            for (std::size_t k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

double rel(const Block& x, const Block& ref) { return max_abs_diff(x, ref) / max_abs(ref); }

}  // namespace

TEST(Chol, Identity) { EXPECT_EQ(chol_lower(Block::identity(4)), Block::identity(4)); }

TEST(Chol, Scalar) {
    Block s(1, 1);
    s(0, 0) = 4.0;
    EXPECT_EQ(chol_lower(s)(0, 0), 2.0);
}

TEST(Chol, ReconstructsRandomSpd) {
    std::mt19937_64 rng(11);
    Block s = random_spd(rng, 6);
    Block l = chol_lower(s);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_GT(l(i, i), 0.0);
        for (std::size_t j = i + 1; j < 6; ++j) EXPECT_EQ(l(i, j), 0.0);
    }
    EXPECT_LE(rel(naive(l, l.transposed()), s), 1e-13);
}

TEST(Chol, RoundTripOnFactors) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10; ++t) {
        Block l = random_lower(rng, 7);
        EXPECT_LE(rel(chol_lower(naive(l, l.transposed())), l), 1e-13);
    }
}

TEST(Chol, NotPositiveDefiniteCarriesPivot) {
    Block s = Block::identity(3);
    s(2, 2) = -1.0;
    try {
        chol_lower(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotPositiveDefinite);
        ASSERT_TRUE(e.pivot.has_value());
        EXPECT_EQ(*e.pivot, 2u);
    }
}

TEST(Solve, IdentityFactor) {
    std::mt19937_64 rng(13);
    Block b = random_block(rng, 3, 4);
    EXPECT_EQ(solve_lower_right(Block::identity(4), b), b);
}

TEST(Solve, Scalar) {
    Block l(1, 1), b(1, 1);
    l(0, 0) = 2.0;
    b(0, 0) = 6.0;
    EXPECT_EQ(solve_lower_right(l, b)(0, 0), 3.0);
}

TEST(Solve, ResidualRandom) {
    std::mt19937_64 rng(14);
    Block l = random_lower(rng, 5);
    Block b = random_block(rng, 5, 5);
    Block x = solve_lower_right(l, b);
    EXPECT_LE(rel(naive(x, l.transposed()), b), 1e-13);
}

TEST(Solve, SingularTriangular) {
    Block l = Block::identity(3);
    l(1, 1) = 0.0;
    try {
        solve_lower_right(l, Block(2, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SingularTriangular);
    }
}

TEST(Invert, Identity) { EXPECT_EQ(invert_lower(Block::identity(5)), Block::identity(5)); }

TEST(Invert, ClosedForm2x2) {
    Block l(2, 2);
    l(0, 0) = 2.0;
    l(1, 0) = 1.0;
    l(1, 1) = 1.0;
    Block inv = invert_lower(l);
    EXPECT_EQ(inv(0, 0), 0.5);
    EXPECT_EQ(inv(0, 1), 0.0);
    EXPECT_EQ(inv(1, 0), -0.5);
    EXPECT_EQ(inv(1, 1), 1.0);
}

TEST(Invert, ResidualRandom) {
    std::mt19937_64 rng(15);
    Block l = random_lower(rng, 8);
    Block inv = invert_lower(l);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = i + 1; j < 8; ++j) EXPECT_EQ(inv(i, j), 0.0);
    EXPECT_LE(max_abs_diff(naive(l, inv), Block::identity(8)), 1e-13);
}

TEST(Invert, Singular) {
    Block l = Block::identity(2);
    l(0, 0) = 0.0;
    EXPECT_THROW(invert_lower(l), Error);
}

TEST(Gemm, AlphaZeroKeepsC) {
    std::mt19937_64 rng(16);
    Block c = random_block(rng, 3, 3);
    Block keep = c;
    gemm_acc(c, random_block(rng, 3, 3), random_block(rng, 3, 3), 0.0, 1.0);
    EXPECT_EQ(c, keep);
}

TEST(Gemm, IdentityProduct) {
    Block c(4, 4);
    gemm_acc(c, Block::identity(4), Block::identity(4), 1.0, 0.0);
    EXPECT_EQ(c, Block::identity(4));
}

TEST(Gemm, MatchesNaiveAllTransposes) {
    std::mt19937_64 rng(17);
    Block a = random_block(rng, 4, 4), b = random_block(rng, 4, 4), c0 = random_block(rng, 4, 4);
    for (auto ta : {Trans::No, Trans::Yes}) {
        for (auto tb : {Trans::No, Trans::Yes}) {
            Block c = c0;
            gemm_acc(c, a, b, -0.5, 2.0, ta, tb);
            Block ref = naive(ta == Trans::Yes ? a.transposed() : a,
                              tb == Trans::Yes ? b.transposed() : b);
            for (std::size_t k = 0; k < ref.size(); ++k)
                ref.values()[k] = 2.0 * c0.values()[k] - 0.5 * ref.values()[k];
            EXPECT_LE(max_abs_diff(c, ref), 1e-14);
        }
    }
}

TEST(Gemm, RectangularShapes) {
    std::mt19937_64 rng(18);
    Block a = random_block(rng, 3, 5), b = random_block(rng, 2, 5);
    Block c = gemm(a, b, 1.0, Trans::No, Trans::Yes);
    EXPECT_LE(max_abs_diff(c, naive(a, b.transposed())), 1e-14);
}

TEST(Gemm, ShapeMismatch) {
    Block c(2, 2);
    EXPECT_THROW(gemm_acc(c, Block(2, 3), Block(2, 2), 1.0, 0.0), Error);
}

TEST(Ledger, BooksCallsAndFlops) {
    KernelLedger ledger;
    std::mt19937_64 rng(19);
    Block s = random_spd(rng, 4);
    Block l = chol_lower(s, &ledger, ShapeClass::B3);
    solve_lower_right(l, random_block(rng, 2, 4), &ledger, ShapeClass::AB2);
    invert_lower(l, &ledger, ShapeClass::B3);
    Block c(3, 4);
    gemm_acc(c, random_block(rng, 3, 5), random_block(rng, 5, 4), 1.0, 0.0, Trans::No, Trans::No,
             &ledger, ShapeClass::A2B);
    EXPECT_EQ(ledger.calls(KernelKind::Potrf, ShapeClass::B3), 1u);
    EXPECT_DOUBLE_EQ(ledger.flops(KernelKind::Potrf, ShapeClass::B3), 64.0 / 3.0);
    EXPECT_EQ(ledger.calls(KernelKind::Trsm, ShapeClass::AB2), 1u);
    EXPECT_EQ(ledger.flops(KernelKind::Trsm, ShapeClass::AB2), 2.0 * 16.0);
    EXPECT_EQ(ledger.calls(KernelKind::Trsm, ShapeClass::B3), 1u);
    EXPECT_EQ(ledger.flops(KernelKind::Trsm, ShapeClass::B3), 64.0);
    EXPECT_EQ(ledger.calls(KernelKind::Gemm, ShapeClass::A2B), 1u);
    EXPECT_EQ(ledger.flops(KernelKind::Gemm, ShapeClass::A2B), 2.0 * 3 * 4 * 5);
    EXPECT_EQ(ledger.total_calls(), 4u);
}

TEST(Ledger, EmptyOperandsAreNotBooked) {
    KernelLedger ledger;
    Block c(0, 3);
    gemm_acc(c, Block(0, 2), Block(2, 3), 1.0, 1.0, Trans::No, Trans::No, &ledger);
    Block d(3, 3);
    gemm_acc(d, Block(3, 0), Block(0, 3), 1.0, 1.0, Trans::No, Trans::No, &ledger);
    solve_lower_right(Block::identity(3), Block(0, 3), &ledger);
    chol_lower(Block(0, 0), &ledger);
    EXPECT_EQ(ledger.total_calls(), 0u);
}

TEST(Ledger, JsonRowsAndMerge) {
    KernelLedger a, b;
    a.record(KernelKind::Gemm, ShapeClass::B3, 10.0, 0.5);
    b.record(KernelKind::Gemm, ShapeClass::B3, 6.0, 0.25);
    b.record(KernelKind::Potrf, ShapeClass::A3, 1.0, 0.0);
    a.merge(b);
    auto j = a.to_json();
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["kernel"], "POTRF");
    EXPECT_EQ(j[0]["shape_class"], "a3");
    EXPECT_EQ(j[1]["kernel"], "GEMM");
    EXPECT_EQ(j[1]["calls"], 2);
    EXPECT_EQ(j[1]["flops"], 16.0);
    a.reset();
    EXPECT_EQ(a.total_calls(), 0u);
}
