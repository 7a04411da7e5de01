#pragma once

#include <optional>
#include <vector>

#include "serinv/bta.hpp"
#include "serinv/ledger.hpp"
#include "serinv/transport.hpp"

namespace serinv {

inline constexpr double kDefaultRatio = 1.8;
inline constexpr double kTheoreticalRatio = 2.25;

struct PartitionRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    friend bool operator==(const PartitionRange&, const PartitionRange&) = default;
};

// Rank p owns diagonal blocks [ranges[p].begin, ranges[p].end). Rank 0 is the
// top partition, the others are middle partitions.
struct PartitionPlan {
    int ranks = 1;
    double ratio = kDefaultRatio;
    std::size_t n = 0;
    std::vector<PartitionRange> ranges;
};

// Top size round(r n / (r + P - 1)) clamped to [2, n - 3(P - 1)]; the rest
// split evenly, earlier middle partitions taking the remainder.
PartitionPlan plan_partitions(std::size_t n, int ranks, double ratio);

// Partition state after the forward pass. Local block 0 is global block
// range.begin. Eliminated columns hold factor blocks; boundary columns (the
// last one, and for middle partitions also the first) hold Schur complements.
struct PartitionFactor {
    PartitionRange range;
    bool middle = false;
    bool last = false;
    std::vector<Block> diag;
    std::vector<Block> lower;    // local (i+1, i), i < size-1
    std::vector<Block> arrow;
    std::vector<Block> fill_in;  // middle only: [i] couples local 0 and i
    Block tip_update;
    Block next_coupling;         // A(end, end-1) unless last
};

PartitionFactor partial_pobtaf(const BtaMatrix& a, PartitionRange range,
                               KernelLedger* ledger = nullptr);
PartitionFactor permuted_pobtaf(const BtaMatrix& a, PartitionRange range,
                                KernelLedger* ledger = nullptr);

// Blocks this partition contributes to the reduced system, in the order
// assemble_reduced_system expects.
std::vector<Block> boundary_blocks(const PartitionFactor& f);

// Reduced system from each rank's boundary blocks (rank order) and the
// accumulated tip. Diagonal order: top last, then first and last of every
// middle partition.
BtaMatrix assemble_reduced_system(const std::vector<std::vector<Block>>& per_rank,
                                  const Block& tip);

// Inverse blocks of the reduced system that one partition needs back.
struct BoundaryInverse {
    Block first_diag;
    Block first_arrow;
    Block last_diag;
    Block last_arrow;
    Block inner_coupling;  // X(last, first), middle only
    Block next_coupling;   // X(end, end-1) unless last
    Block tip;
};

std::vector<BoundaryInverse> split_reduced_inverse(const SelectedInverse& xr);
std::vector<Block> pack(const BoundaryInverse& bi);
BoundaryInverse unpack_boundary(std::vector<Block> blocks, bool middle, bool last);

struct PartitionInverse {
    PartitionRange range;
    std::vector<Block> diag;
    std::vector<Block> lower;  // local (i+1, i), i < size-1
    std::vector<Block> arrow;
    Block next_coupling;       // X(end, end-1) unless last
};

PartitionInverse partial_pobtasi(const PartitionFactor& f, const BoundaryInverse& bi,
                                 KernelLedger* ledger = nullptr);
PartitionInverse permuted_pobtasi(const PartitionFactor& f, const BoundaryInverse& bi,
                                  KernelLedger* ledger = nullptr);

SelectedInverse merge_partitions(const std::vector<PartitionInverse>& parts, const Block& tip,
                                 std::size_t n, std::size_t b, std::size_t a);

enum class ReducedSolve { Sequential, Nested };

// Sequential selected inversion of the reduced system.
SelectedInverse pobtarssi(const BtaMatrix& reduced, KernelLedger* ledger = nullptr);

// Collective over comm. Sequential mode solves on rank 0 only; nested mode
// runs the distributed pipeline on ranks [0, P/2). `reduced` is read on rank
// 0 only; the result is returned on rank 0.
std::optional<SelectedInverse> pobtarssi(Communicator& comm, const BtaMatrix* reduced,
                                         ReducedSolve mode, double ratio,
                                         KernelLedger* ledger = nullptr);

struct ForwardResult {
    PartitionFactor factor;
    Block reduced_tip;  // rank 0 only: A_tip + sum of the tip updates
};

ForwardResult ppobtaf(Communicator& comm, const BtaMatrix& a, const PartitionPlan& plan,
                      KernelLedger* ledger = nullptr);

// Gathers boundary blocks; returns the reduced system on rank 0.
std::optional<BtaMatrix> assemble_reduced_system(Communicator& comm, const ForwardResult& fwd);

// Scatters the reduced inverse (read on rank 0) and runs this rank's backward pass.
PartitionInverse ppobtasi(Communicator& comm, const PartitionFactor& f,
                          const SelectedInverse* reduced_inverse, KernelLedger* ledger = nullptr);

struct PhaseTimes {
    double forward = 0.0;
    double reduced = 0.0;
    double backward = 0.0;
    double total = 0.0;
};

struct RankReport {
    int rank = 0;
    PartitionRange range;
    KernelLedger forward;
    KernelLedger reduced;
    KernelLedger backward;
    PhaseTimes seconds;
};

struct RankOutcome {
    std::optional<SelectedInverse> inverse;  // rank 0 only
    std::size_t reduced_blocks = 0;          // rank 0 only
    RankReport report;
};

// One rank's share of the full pipeline, collective over comm.
RankOutcome pselinv_rank(Communicator& comm, const BtaMatrix& a, const PartitionPlan& plan,
                         ReducedSolve mode);

struct ParallelResult {
    SelectedInverse inverse;
    PartitionPlan plan;
    std::size_t reduced_blocks = 0;
    std::vector<RankReport> ranks;
};

// Full pipeline on `ranks` in-process ranks.
ParallelResult pselinv(const BtaMatrix& a, int ranks, double ratio = kDefaultRatio,
                       bool nested = false,
                       const TransportConfig& config = TransportConfig::from_env());

}  // namespace serinv
