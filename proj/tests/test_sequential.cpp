#include <gtest/gtest.h>

#include <random>

#include "serinv/kernels.hpp"
#include "serinv/oracle.hpp"
#include "serinv/sequential.hpp"

using namespace serinv;

namespace {

// Dense N x N lower factor; to_dense would mirror the lower blocks.
Block dense_lower(const BtaMatrix& l) {
    Block d(l.dimension(), l.dimension());
    const std::size_t nb = l.n * l.b;
    for (std::size_t i = 0; i < l.n; ++i) {
        place(d, l.diag[i], i * l.b, i * l.b);
        place(d, l.arrow[i], nb, i * l.b);
        if (i + 1 < l.n) place(d, l.lower[i], (i + 1) * l.b, i * l.b);
    }
    place(d, l.tip, nb, nb);
    return d;
}

double symmetry_error(const Block& x) {
    return max_abs_diff(x, x.transposed()) / std::max(max_abs(x), 1e-300);
}

}  // namespace

TEST(Pobtaf, IdentityFactor) {
    auto f = pobtaf(BtaMatrix::identity(3, 2, 1));
    EXPECT_TRUE(bit_equal(f.l, BtaMatrix::identity(3, 2, 1)));
    EXPECT_TRUE(f.fill_in.empty());
}

TEST(Pobtaf, MatchesDenseCholesky) {
    auto a = generate_spd_bta(1, 4, 2, 1, 1.0);
    auto f = pobtaf(a);
    auto ref = extract_pattern(dense_cholesky(a), a.n, a.b, a.a);
    EXPECT_LE(max_relative_error(f.l, ref), 1e-12);
}

TEST(Pobtaf, ReconstructsOnPattern) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto a = generate_spd_bta(seed, 3 + seed, 1 + seed % 4, seed % 3, 0.5);
        Block l = dense_lower(pobtaf(a).l);
        Block llt = gemm(l, l, 1.0, Trans::No, Trans::Yes);
        auto back = extract_pattern(llt, a.n, a.b, a.a);
        EXPECT_LE(max_relative_error(back, a), 1e-12) << "seed " << seed;
        // Products outside the pattern vanish: no fill-in.
        auto full = to_dense(a);
        EXPECT_LE(max_abs_diff(llt, full) / max_abs(full), 1e-12);
    }
}

TEST(Pobtaf, LedgerForFourBlocks) {
    KernelLedger ledger;
    pobtaf(generate_spd_bta(1, 4, 2, 1, 1.0), &ledger);
    EXPECT_EQ(ledger.calls(KernelKind::Potrf, ShapeClass::B3), 4u);
    EXPECT_EQ(ledger.calls(KernelKind::Trsm, ShapeClass::AB2), 4u);
    EXPECT_EQ(ledger.calls(KernelKind::Gemm, ShapeClass::B3), 3u);
    EXPECT_EQ(ledger.calls(KernelKind::Potrf, ShapeClass::A3), 1u);
}

TEST(Pobtaf, ReportsFailingBlock) {
    auto a = BtaMatrix::identity(4, 2, 1);
    a.diag[2](1, 1) = -3.0;
    try {
        pobtaf(a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotPositiveDefinite);
        ASSERT_TRUE(e.block.has_value());
        EXPECT_EQ(*e.block, 2u);
        EXPECT_EQ(*e.pivot, 1u);
    }
}

TEST(Pobtaf, ReportsFailingTip) {
    auto a = BtaMatrix::identity(2, 1, 1);
    a.tip(0, 0) = 0.0;
    try {
        pobtaf(a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotPositiveDefinite);
        EXPECT_EQ(*e.block, 2u);
    }
}

TEST(Pobtasi, IdentityInverse) {
    auto x = pobtasi(pobtaf(BtaMatrix::identity(3, 2, 1)));
    EXPECT_TRUE(bit_equal(x, BtaMatrix::identity(3, 2, 1)));
}

TEST(Pobtasi, MatchesDenseInverse) {
    auto a = generate_spd_bta(1, 4, 2, 1, 1.0);
    auto x = pobtasi(pobtaf(a));
    EXPECT_LE(max_relative_error(x, dense_selected_inverse(a)), 1e-9);
}

TEST(Pobtasi, LedgerOfThisImplementation) {
    // Each column inverts its diagonal factor once and issues one a^2 b
    // product with the inverse tip, the last column included.
    KernelLedger ledger;
    auto f = pobtaf(generate_spd_bta(1, 4, 2, 1, 1.0));
    pobtasi(f, &ledger);
    EXPECT_EQ(ledger.calls(KernelKind::Trsm, ShapeClass::B3), 4u);
    EXPECT_EQ(ledger.calls(KernelKind::Gemm, ShapeClass::A2B), 4u);
    EXPECT_EQ(ledger.calls(KernelKind::Trsm, ShapeClass::A3), 1u);
    EXPECT_EQ(ledger.calls(KernelKind::Gemm, ShapeClass::A3), 1u);
    EXPECT_EQ(ledger.calls(KernelKind::Potrf, ShapeClass::B3), 0u);
}

TEST(Selinv, ScalarTridiagonal) {
    auto a = BtaMatrix::zeros(3, 1, 0);
    for (auto& d : a.diag) d(0, 0) = 4.0;
    a.lower[0](0, 0) = -1.0;
    a.lower[1](0, 0) = 1.5;
    auto x = selinv(a);
    EXPECT_LE(max_relative_error(x, dense_selected_inverse(a)), 1e-12);
}

TEST(Selinv, Identity) {
    EXPECT_TRUE(bit_equal(selinv(BtaMatrix::identity(5, 3, 2)), BtaMatrix::identity(5, 3, 2)));
}

TEST(Selinv, ArrowFreeSkipsArrowKernels) {
    auto a = generate_spd_bta(21, 7, 3, 0, 1.0);
    KernelLedger ledger;
    auto x = selinv(a, &ledger);
    EXPECT_LE(max_relative_error(x, dense_selected_inverse(a)), 1e-9);
    for (auto kind : kAllKernels) {
        for (auto shape : {ShapeClass::AB2, ShapeClass::A2B, ShapeClass::A3}) {
            EXPECT_EQ(ledger.calls(kind, shape), 0u);
        }
    }
    EXPECT_EQ(x.tip.size(), 0u);
}

TEST(Selinv, SingleBlock) {
    auto a = generate_spd_bta(22, 1, 4, 3, 1.0);
    EXPECT_LE(max_relative_error(selinv(a), dense_selected_inverse(a)), 1e-9);
}

TEST(Selinv, InputsPreserved) {
    auto a = generate_spd_bta(23, 6, 3, 2, 0.5);
    auto copy = a;
    selinv(a);
    EXPECT_TRUE(bit_equal(a, copy));
}

TEST(SelinvProperty, OracleEquivalenceAndSymmetry) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> pick_n(1, 64), pick_b(1, 16), pick_a(0, 8);
    const double densities[] = {0.05, 0.5, 1.0};
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = pick_n(rng), b = pick_b(rng), a = pick_a(rng);
        const double density = densities[trial % 3];
        auto m = generate_spd_bta(1000 + trial, n, b, a, density);
        auto x = selinv(m);
        EXPECT_LE(max_relative_error(x, dense_selected_inverse(m)), 1e-9)
            << "n=" << n << " b=" << b << " a=" << a << " density=" << density;
        for (const auto& d : x.diag) EXPECT_LE(symmetry_error(d), 1e-10);
        if (a > 0) EXPECT_LE(symmetry_error(x.tip), 1e-10);
    }
}
