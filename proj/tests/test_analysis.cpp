#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "serinv/analysis.hpp"
#include "serinv/sequential.hpp"

using namespace serinv;

namespace {

void expect_same_counts(const KernelLedger& got, const KernelLedger& want, const std::string& what) {
    for (auto kind : kAllKernels) {
        for (auto shape : kAllShapes) {
            EXPECT_EQ(got.calls(kind, shape), want.calls(kind, shape))
                << what << " " << kernel_name(kind) << " " << shape_name(shape);
            EXPECT_DOUBLE_EQ(got.flops(kind, shape), want.flops(kind, shape))
                << what << " " << kernel_name(kind) << " " << shape_name(shape);
        }
    }
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no serinv::Error thrown";
    return Errc::IoError;
}

}  // namespace

TEST(Counts, SingleBlockRunsClosingLinesOnly) {
    auto l = predicted_counts(Routine::Pobtaf, 1, 4, 2, 1);
    EXPECT_EQ(l.calls(KernelKind::Potrf, ShapeClass::B3), 1u);
    EXPECT_EQ(l.calls(KernelKind::Potrf, ShapeClass::A3), 1u);
    EXPECT_EQ(l.calls(KernelKind::Trsm, ShapeClass::AB2), 1u);
    EXPECT_EQ(l.calls(KernelKind::Gemm, ShapeClass::A2B), 1u);
    EXPECT_EQ(l.total_calls(), 4u);

    KernelLedger measured;
    pobtaf(generate_spd_bta(1, 1, 4, 2, 1.0), &measured);
    expect_same_counts(measured, l, "n=1");
}

TEST(Counts, FactorToInverseRatioIsThreeHalves) {
    const double big = flop_count(Routine::Pobtaf, 1000000, 8, 0, 1, CountSource::Reference,
                                  Weighting::UnitVolume) /
                       flop_count(Routine::Pobtasi, 1000000, 8, 0, 1, CountSource::Reference,
                                  Weighting::UnitVolume);
    EXPECT_NEAR(big, 1.5, 1e-5);
    const double small = flop_count(Routine::Pobtaf, 10, 8, 0, 1, CountSource::Reference,
                                    Weighting::UnitVolume) /
                         flop_count(Routine::Pobtasi, 10, 8, 0, 1, CountSource::Reference,
                                    Weighting::UnitVolume);
    EXPECT_GT(std::abs(small - 1.5), std::abs(big - 1.5));
}

TEST(Counts, TableMiddleRankPotrf) {
    for (std::size_t np : {3u, 4u, 8u, 20u}) {
        auto l = predicted_counts(Routine::Ppobtaf, 4 * np, 16, 4, 4, CountSource::Reference);
        EXPECT_EQ(l.calls(KernelKind::Potrf, ShapeClass::B3), np - 2);
    }
}

TEST(Counts, ArrowFreeDropsArrowClasses) {
    for (auto source : {CountSource::Reference, CountSource::Implementation}) {
        auto l = predicted_counts(Routine::Pobtaf, 10, 4, 0, 1, source);
        for (auto kind : kAllKernels) {
            for (auto shape : {ShapeClass::AB2, ShapeClass::A2B, ShapeClass::A3}) {
                EXPECT_EQ(l.calls(kind, shape), 0u);
            }
        }
    }
}

TEST(Counts, InfeasibleParallelParameters) {
    EXPECT_EQ(code_of([] { predicted_counts(Routine::Ppobtaf, 10, 4, 2, 1); }),
              Errc::InfeasibleParameters);
    EXPECT_EQ(code_of([] { predicted_counts(Routine::Ppobtasi, 5, 4, 2, 2); }),
              Errc::InfeasibleParameters);
    EXPECT_EQ(code_of([] { flop_count(Routine::Pobtaf, 0, 4, 2, 1); }), Errc::InfeasibleParameters);
}

TEST(ModelProperty, SequentialLedgersMatch) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 1 + rng() % 30, b = 1 + rng() % 8, a = rng() % 5;
        auto m = generate_spd_bta(300 + trial, n, b, a, 1.0);
        KernelLedger f, s;
        auto factor = pobtaf(m, &f);
        pobtasi(factor, &s);
        const std::string what = "n=" + std::to_string(n) + " b=" + std::to_string(b) +
                                 " a=" + std::to_string(a);
        expect_same_counts(f, predicted_counts(Routine::Pobtaf, n, b, a, 1), what + " pobtaf");
        expect_same_counts(s, predicted_counts(Routine::Pobtasi, n, b, a, 1), what + " pobtasi");
    }
}

TEST(ModelProperty, ParallelLedgersMatch) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 12; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 4);
        const std::size_t np = 3 + rng() % 6, b = 1 + rng() % 5, a = rng() % 4;
        const std::size_t n = np * static_cast<std::size_t>(p);
        // r = 1 gives every partition n / P blocks.
        auto result = pselinv(generate_spd_bta(400 + trial, n, b, a, 1.0), p, 1.0);
        const std::string what = "P=" + std::to_string(p) + " np=" + std::to_string(np);
        for (std::size_t q = 1; q < result.ranks.size(); ++q) {
            ASSERT_EQ(result.ranks[q].range.size(), np);
            expect_same_counts(result.ranks[q].forward,
                               predicted_counts(Routine::Ppobtaf, n, b, a, p), what + " ppobtaf");
            expect_same_counts(result.ranks[q].backward,
                               predicted_counts(Routine::Ppobtasi, n, b, a, p), what + " ppobtasi");
        }
        expect_same_counts(result.ranks[0].reduced, predicted_counts(Routine::Pobtarssi, n, b, a, p),
                           what + " pobtarssi");
    }
}

TEST(ModelProperty, WorkConservation) {
    for (int p = 1; p <= 8; ++p) {
        for (std::size_t n : {24u, 40u, 64u}) {
            auto plan = plan_partitions(n, p, kDefaultRatio);
            double parallel_flops = 0.0;
            std::uint64_t parallel_calls = 0;
            for (int q = 0; q < p; ++q) {
                for (auto phase : {Phase::Forward, Phase::Reduced}) {
                    auto l = predicted_rank_counts(phase, plan, q, 6, 3);
                    parallel_flops += l.total_flops();
                    parallel_calls += l.total_calls();
                }
            }
            auto seq = predicted_counts(Routine::Pobtaf, n, 6, 3, 1);
            EXPECT_GE(parallel_flops, seq.total_flops()) << "P=" << p << " n=" << n;
            EXPECT_GE(parallel_calls, seq.total_calls()) << "P=" << p << " n=" << n;
        }
    }
}

TEST(Efficiency, SingleRankIsExactlyOne) {
    EXPECT_EQ(theoretical_efficiency(512, 1024, 256, 1, kDefaultRatio), 1.0);
    EXPECT_EQ(theoretical_efficiency(7, 3, 0, 1, 1.0), 1.0);
}

TEST(Efficiency, BelowOneWithSeveralRanks) {
    for (int p : {2, 3, 4, 16, 32}) {
        const double e = theoretical_efficiency(512, 1024, 256, p, kTheoreticalRatio);
        EXPECT_LT(e, 1.0) << p;
        EXPECT_GT(e, 0.0) << p;
    }
}

TEST(Efficiency, FewerRanksMoreEfficient) {
    double previous = 1.0;
    for (int p = 1; p <= 32; ++p) {
        const double e = theoretical_efficiency(512, 1024, 256, p, kTheoreticalRatio);
        EXPECT_LE(e, previous) << "P=" << p;
        previous = e;
    }
    EXPECT_LT(theoretical_efficiency(512, 1024, 256, 32, kTheoreticalRatio),
              theoretical_efficiency(512, 1024, 256, 2, kTheoreticalRatio));
}

TEST(Efficiency, MoreBlocksMoreEfficient) {
    for (int p : {2, 4, 8}) {
        double previous = 0.0;
        for (std::size_t n : {32u, 64u, 128u, 256u, 512u}) {
            const double e = theoretical_efficiency(n, 1024, 256, p, kTheoreticalRatio);
            EXPECT_GE(e, previous) << "P=" << p << " n=" << n;
            previous = e;
        }
        EXPECT_GT(theoretical_efficiency(512, 1024, 256, p, kTheoreticalRatio),
                  theoretical_efficiency(32, 1024, 256, p, kTheoreticalRatio));
    }
}

TEST(Efficiency, InfeasiblePlan) {
    EXPECT_EQ(code_of([] { theoretical_efficiency(5, 4, 2, 3, 1.8); }), Errc::InfeasibleParameters);
}

TEST(LoadBalance, LargeProblemNearTheoreticalRatio) {
    auto lb = ideal_load_balance(512, 1024, 256);
    EXPECT_NEAR(lb.ratio, 2.25, 0.05);
    EXPECT_GT(lb.forward, lb.backward);
}

TEST(LoadBalance, ForwardShareOfMiddleRank) {
    auto lb = ideal_load_balance(32, 1024, 256);
    EXPECT_NEAR(lb.forward_weight, 0.34, 0.02);
    EXPECT_GE(lb.ratio, std::min(lb.forward, lb.backward));
    EXPECT_LE(lb.ratio, std::max(lb.forward, lb.backward));
}

TEST(LoadBalance, GrowsTowardColumnRatio) {
    double previous = 0.0;
    for (std::size_t n : {8u, 32u, 128u, 512u, 4096u}) {
        const double r = ideal_load_balance(n, 1024, 256).ratio;
        EXPECT_GT(r, previous) << n;
        previous = r;
    }
}

TEST(LoadBalance, RequiresFourBlocks) {
    EXPECT_EQ(code_of([] { ideal_load_balance(3, 8, 2); }), Errc::InfeasibleParameters);
}

TEST(Report, JsonShape) {
    auto j = model_report(64, 16, 4, 4, kDefaultRatio);
    EXPECT_EQ(j["schema"], "serinv.model/1");
    EXPECT_EQ(j["routines"].size(), 5u);
    EXPECT_EQ(j["efficiency_over_P"][0]["P"], 1);
    EXPECT_EQ(j["efficiency_over_P"][0]["efficiency"], 1.0);
    EXPECT_TRUE(j.contains("load_balance"));
    EXPECT_GT(j["routines"][0]["flops"].get<double>(), 0.0);
}
