#include <chrono>
#include <mutex>

#include "serinv/parallel.hpp"
#include "serinv/sequential.hpp"

namespace serinv {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t index(int r) { return static_cast<std::size_t>(r); }

std::vector<Block> flatten(const BtaMatrix& m) {
    std::vector<Block> out;
    out.reserve(2 * m.n + 1);
    out.insert(out.end(), m.diag.begin(), m.diag.end());
    out.insert(out.end(), m.lower.begin(), m.lower.end());
    out.insert(out.end(), m.arrow.begin(), m.arrow.end());
    out.push_back(m.tip);
    return out;
}

BtaMatrix unflatten(std::vector<Block> blocks) {
    if (blocks.size() < 3 || blocks.size() % 3 != 0) {
        throw Error(Errc::ShapeMismatch, "malformed BTA payload");
    }
    const std::size_t n = blocks.size() / 3;
    BtaMatrix m;
    m.n = n;
    m.b = blocks[0].rows();
    m.a = blocks.back().rows();
    m.symmetric = false;
    auto at = [&](std::size_t i) { return std::make_move_iterator(blocks.begin() + static_cast<std::ptrdiff_t>(i)); };
    m.diag.assign(at(0), at(n));
    m.lower.assign(at(n), at(2 * n - 1));
    m.arrow.assign(at(2 * n - 1), at(3 * n - 1));
    m.tip = std::move(blocks.back());
    validate(m);
    return m;
}

std::vector<Block> pack(const PartitionInverse& x) {
    std::vector<Block> out;
    out.insert(out.end(), x.diag.begin(), x.diag.end());
    out.insert(out.end(), x.lower.begin(), x.lower.end());
    out.insert(out.end(), x.arrow.begin(), x.arrow.end());
    out.push_back(x.next_coupling);
    return out;
}

PartitionInverse unpack_inverse(std::vector<Block> blocks, PartitionRange range) {
    const std::size_t m = range.size();
    if (blocks.size() != 3 * m) {
        throw Error(Errc::ShapeMismatch, "malformed partition inverse payload");
    }
    auto at = [&](std::size_t i) { return std::make_move_iterator(blocks.begin() + static_cast<std::ptrdiff_t>(i)); };
    PartitionInverse x;
    x.range = range;
    x.diag.assign(at(0), at(m));
    x.lower.assign(at(m), at(2 * m - 1));
    x.arrow.assign(at(2 * m - 1), at(3 * m - 1));
    x.next_coupling = std::move(blocks.back());
    return x;
}

void check_plan(const Communicator& comm, const PartitionPlan& plan, const BtaMatrix& a) {
    if (plan.ranks != comm.size() || plan.ranges.size() != index(comm.size())) {
        throw Error(Errc::InfeasibleParameters, "plan and communicator sizes differ");
    }
    if (plan.n != a.n) {
        throw Error(Errc::InfeasibleParameters, "plan was made for a different matrix");
    }
}

}  // namespace

ForwardResult ppobtaf(Communicator& comm, const BtaMatrix& a, const PartitionPlan& plan,
                      KernelLedger* ledger) {
    check_plan(comm, plan, a);
    const auto range = plan.ranges[index(comm.rank())];
    ForwardResult out;
    out.factor = comm.rank() == 0 ? partial_pobtaf(a, range, ledger)
                                  : permuted_pobtaf(a, range, ledger);
    Block total = reduce_sum(comm, out.factor.tip_update, 0);
    if (comm.rank() == 0) {
        out.reduced_tip = a.tip;
        for (std::size_t k = 0; k < total.size(); ++k) {
            out.reduced_tip.values()[k] += total.values()[k];
        }
    }
    return out;
}

std::optional<BtaMatrix> assemble_reduced_system(Communicator& comm, const ForwardResult& fwd) {
    auto all = gather_blocks(comm, boundary_blocks(fwd.factor), 0);
    if (comm.rank() != 0) {
        return std::nullopt;
    }
    return assemble_reduced_system(all, fwd.reduced_tip);
}

std::optional<SelectedInverse> pobtarssi(Communicator& comm, const BtaMatrix* reduced,
                                         ReducedSolve mode, double ratio, KernelLedger* ledger) {
    if (mode == ReducedSolve::Sequential) {
        if (comm.rank() != 0) {
            return std::nullopt;
        }
        return pobtarssi(*reduced, ledger);
    }

    const int nested = comm.size() / 2;
    const std::size_t nr = 2 * index(comm.size()) - 1;
    if (nested < 2 || nr < 3 * index(nested)) {
        throw Error(Errc::NestedInfeasible,
                    "nested solving needs at least 2 ranks on the half-size group and 3 reduced "
                    "blocks per rank (P = " + std::to_string(comm.size()) + ")");
    }
    auto sub = comm.split(nested);
    if (!sub) {
        return std::nullopt;
    }
    std::vector<std::vector<Block>> copies;
    if (sub->rank() == 0) {
        copies.assign(index(nested), flatten(*reduced));
    }
    BtaMatrix local = unflatten(scatter_blocks(*sub, std::move(copies), 0));
    PartitionPlan plan = plan_partitions(local.n, nested, ratio);
    RankOutcome outcome = pselinv_rank(*sub, local, plan, ReducedSolve::Sequential);
    if (ledger) {
        ledger->merge(outcome.report.forward);
        ledger->merge(outcome.report.reduced);
        ledger->merge(outcome.report.backward);
    }
    return std::move(outcome.inverse);
}

PartitionInverse ppobtasi(Communicator& comm, const PartitionFactor& f,
                          const SelectedInverse* reduced_inverse, KernelLedger* ledger) {
    std::vector<std::vector<Block>> pieces;
    if (comm.rank() == 0) {
        for (const auto& bi : split_reduced_inverse(*reduced_inverse)) {
            pieces.push_back(pack(bi));
        }
    }
    BoundaryInverse bi =
        unpack_boundary(scatter_blocks(comm, std::move(pieces), 0), f.middle, f.last);
    return f.middle ? permuted_pobtasi(f, bi, ledger) : partial_pobtasi(f, bi, ledger);
}

RankOutcome pselinv_rank(Communicator& comm, const BtaMatrix& a, const PartitionPlan& plan,
                         ReducedSolve mode) {
    RankOutcome out;
    out.report.rank = comm.rank();
    out.report.range = plan.ranges.at(index(comm.rank()));
    const auto t_start = Clock::now();

    auto t0 = Clock::now();
    ForwardResult fwd = ppobtaf(comm, a, plan, &out.report.forward);
    out.report.seconds.forward = since(t0);

    t0 = Clock::now();
    std::optional<BtaMatrix> reduced = assemble_reduced_system(comm, fwd);
    if (reduced) {
        out.reduced_blocks = reduced->n;
    }
    std::optional<SelectedInverse> xr = pobtarssi(comm, reduced ? &*reduced : nullptr, mode,
                                                  plan.ratio, &out.report.reduced);
    out.report.seconds.reduced = since(t0);

    t0 = Clock::now();
    PartitionInverse mine = ppobtasi(comm, fwd.factor, xr ? &*xr : nullptr, &out.report.backward);
    auto all = gather_blocks(comm, pack(mine), 0);
    if (comm.rank() == 0) {
        std::vector<PartitionInverse> parts;
        parts.reserve(all.size());
        for (std::size_t r = 0; r < all.size(); ++r) {
            parts.push_back(unpack_inverse(std::move(all[r]), plan.ranges[r]));
        }
        out.inverse = merge_partitions(parts, xr->tip, a.n, a.b, a.a);
    }
    out.report.seconds.backward = since(t0);
    out.report.seconds.total = since(t_start);
    return out;
}

ParallelResult pselinv(const BtaMatrix& a, int ranks, double ratio, bool nested,
                       const TransportConfig& config) {
    validate(a);
    ParallelResult result;
    result.plan = plan_partitions(a.n, ranks, ratio);
    result.ranks.resize(index(ranks));
    std::mutex root_mutex;
    const ReducedSolve mode = nested ? ReducedSolve::Nested : ReducedSolve::Sequential;
    run_in_process(
        ranks,
        [&](Communicator& comm) {
            RankOutcome outcome = pselinv_rank(comm, a, result.plan, mode);
            // Each rank writes only its own slot.
            result.ranks[index(comm.rank())] = std::move(outcome.report);
            if (outcome.inverse) {
                std::lock_guard lock(root_mutex);
                result.inverse = std::move(*outcome.inverse);
                result.reduced_blocks = outcome.reduced_blocks;
            }
        },
        config);
    return result;
}

}  // namespace serinv
