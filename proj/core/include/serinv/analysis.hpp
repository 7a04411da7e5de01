#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "serinv/ledger.hpp"
#include "serinv/parallel.hpp"

namespace serinv {

enum class Routine { Pobtaf, Pobtasi, Ppobtaf, Pobtarssi, Ppobtasi };

std::string_view routine_name(Routine r);

// Reference: one call per kernel class per column, as tabulated for comparison.
// Implementation: the exact kernel sequence this library issues, with the
// operand sizes of the stacked middle-partition calls.
enum class CountSource { Reference, Implementation };

// Flops: POTRF s^3/3, GEMM 2mnk, TRSM m n^2.
// UnitVolume: every call weighs the volume of its shape class (b^3, ab^2,
// a^2 b, a^3), i.e. the number of O(b^3) block operations.
enum class Weighting { Flops, UnitVolume };

// Predicted calls and flops per (kernel, shape class). PPOBTAF and PPOBTASI
// describe one middle rank owning floor(n / P) blocks; POBTARSSI is the
// sequential solve of a reduced system with 2P - 1 blocks.
KernelLedger predicted_counts(Routine routine, std::size_t n, std::size_t b, std::size_t a,
                              int ranks, CountSource source = CountSource::Implementation,
                              Weighting weighting = Weighting::Flops);

double flop_count(Routine routine, std::size_t n, std::size_t b, std::size_t a, int ranks,
                  CountSource source = CountSource::Implementation,
                  Weighting weighting = Weighting::Flops);

enum class Phase { Forward, Reduced, Backward };

// Exact prediction of one rank's ledger in a pipeline run with sequential
// reduced solve.
KernelLedger predicted_rank_counts(Phase phase, const PartitionPlan& plan, int rank,
                                   std::size_t b, std::size_t a);

struct LoadBalance {
    double forward = 0.0;         // top/middle size ratio balancing PPOBTAF
    double backward = 0.0;        // same for PPOBTASI
    double forward_weight = 0.0;  // PPOBTAF share of a middle rank's operations
    double ratio = 0.0;           // weighted r_LB
};

// Sizes a top partition of r n blocks against a middle partition of n
// blocks so both perform equal modelled work (continuous in r), per routine,
// then weights the two ratios by the middle rank's flop share per routine.
LoadBalance ideal_load_balance(std::size_t n, std::size_t b, std::size_t a);

// Sequential flops / (P * busiest rank's flops), the root carrying the
// sequential reduced solve. Communication is not modelled.
double theoretical_efficiency(std::size_t n, std::size_t b, std::size_t a, int ranks,
                              double ratio);

// Flop counts, r_LB and an efficiency grid over P (and over n at fixed P).
nlohmann::json model_report(std::size_t n, std::size_t b, std::size_t a, int ranks,
                            double ratio);

}  // namespace serinv
