#include <algorithm>
#include <cmath>
#include <string>

#include "columns.hpp"
#include "serinv/kernels.hpp"
#include "serinv/parallel.hpp"
#include "serinv/sequential.hpp"

namespace serinv {

PartitionPlan plan_partitions(std::size_t n, int ranks, double ratio) {
    if (ranks < 1) {
        throw Error(Errc::InfeasibleParameters, "need at least one rank");
    }
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
        throw Error(Errc::InfeasibleParameters, "load-balance ratio must be positive");
    }
    const auto p = static_cast<std::size_t>(ranks);
    if (n < 3 * p) {
        throw Error(Errc::TooFewBlocks, std::to_string(n) + " blocks cannot feed " +
                                            std::to_string(ranks) + " partitions (need 3 per rank)");
    }
    const std::size_t hi = n - 3 * (p - 1);
    const double ideal = ratio * static_cast<double>(n) / (ratio + static_cast<double>(p - 1));
    const auto rounded = static_cast<std::size_t>(std::llround(ideal));
    const std::size_t top = std::clamp<std::size_t>(rounded, 2, hi);

    PartitionPlan plan;
    plan.ranks = ranks;
    plan.ratio = ratio;
    plan.n = n;
    plan.ranges.push_back({0, top});
    if (p > 1) {
        const std::size_t rest = n - top;
        const std::size_t base = rest / (p - 1);
        const std::size_t extra = rest % (p - 1);
        std::size_t begin = top;
        for (std::size_t r = 1; r < p; ++r) {
            std::size_t len = base + (r - 1 < extra ? 1 : 0);
            plan.ranges.push_back({begin, begin + len});
            begin += len;
        }
    }
    return plan;
}

namespace {

PartitionFactor copy_partition(const BtaMatrix& a, PartitionRange range, bool middle) {
    if (range.begin >= range.end || range.end > a.n) {
        throw Error(Errc::ShapeMismatch, "partition range outside the matrix");
    }
    const std::size_t need = middle ? 3 : 2;
    if (range.size() < need && !(range.begin == 0 && range.end == a.n)) {
        throw Error(Errc::TooFewBlocks, "partition has fewer than " + std::to_string(need) +
                                            " diagonal blocks");
    }
    PartitionFactor f;
    f.range = range;
    f.middle = middle;
    f.last = range.end == a.n;
    auto first = [](const std::vector<Block>& v, std::size_t i) {
        return v.begin() + static_cast<std::ptrdiff_t>(i);
    };
    f.diag.assign(first(a.diag, range.begin), first(a.diag, range.end));
    f.lower.assign(first(a.lower, range.begin), first(a.lower, range.end - 1));
    f.arrow.assign(first(a.arrow, range.begin), first(a.arrow, range.end));
    f.tip_update = Block(a.a, a.a);
    if (!f.last) {
        f.next_coupling = a.lower[range.end - 1];
    }
    return f;
}

Block take(const Block& x, std::size_t row, std::size_t col, std::size_t rows, std::size_t cols) {
    return col_range(row_range(x, row, rows), col, cols);
}

}  // namespace

PartitionFactor partial_pobtaf(const BtaMatrix& a, PartitionRange range, KernelLedger* ledger) {
    if (range.begin != 0) {
        throw Error(Errc::ShapeMismatch, "the top partition must start at block 0");
    }
    PartitionFactor f = copy_partition(a, range, false);
    detail::forward_leading(f.diag, f.lower, f.arrow, f.tip_update, range.size(), 0, ledger);
    return f;
}

PartitionFactor permuted_pobtaf(const BtaMatrix& a, PartitionRange range, KernelLedger* ledger) {
    if (range.begin == 0) {
        throw Error(Errc::ShapeMismatch, "a middle partition cannot own block 0");
    }
    PartitionFactor f = copy_partition(a, range, true);
    const std::size_t m = range.size();
    const std::size_t b = a.b;
    f.fill_in.assign(m, Block());

    // Coupling between local block 0 and the column being eliminated.
    Block coupling = f.lower[0].transposed();
    for (std::size_t i = 1; i + 1 < m; ++i) {
        Block s = vstack(f.lower[i], coupling);
        Block w(2 * b, 2 * b);
        place(w, f.diag[i + 1], 0, 0);
        place(w, f.diag[0], b, b);
        Block r = hstack(f.arrow[i + 1], f.arrow[0]);
        try {
            detail::eliminate_column(f.diag[i], s, f.arrow[i], w, r, f.tip_update, ledger);
        } catch (const Error& e) {
            throw e.with_block(range.begin + i);
        }
        f.lower[i] = row_range(s, 0, b);
        f.fill_in[i] = row_range(s, b, b);
        f.diag[i + 1] = take(w, 0, 0, b, b);
        f.diag[0] = take(w, b, b, b, b);
        coupling = take(w, b, 0, b, b);
        f.arrow[i + 1] = col_range(r, 0, b);
        f.arrow[0] = col_range(r, b, b);
    }
    f.fill_in[m - 1] = std::move(coupling);
    return f;
}

std::vector<Block> boundary_blocks(const PartitionFactor& f) {
    const std::size_t m = f.diag.size();
    std::vector<Block> out;
    if (f.middle) {
        out.push_back(f.diag[0]);
        out.push_back(f.arrow[0]);
    }
    out.push_back(f.diag[m - 1]);
    out.push_back(f.arrow[m - 1]);
    if (f.middle) {
        out.push_back(f.fill_in[m - 1].transposed());
    }
    if (!f.last) {
        out.push_back(f.next_coupling);
    }
    return out;
}

BtaMatrix assemble_reduced_system(const std::vector<std::vector<Block>>& per_rank,
                                  const Block& tip) {
    const std::size_t p = per_rank.size();
    if (p == 0 || per_rank[0].size() < 2) {
        throw Error(Errc::ShapeMismatch, "missing boundary blocks");
    }
    const std::size_t b = per_rank[0][0].rows();
    const std::size_t a = per_rank[0][1].rows();
    BtaMatrix r = BtaMatrix::zeros(2 * p - 1, b, a);
    // Schur complements are symmetric only up to rounding of the backend.
    r.symmetric = false;
    for (std::size_t q = 0; q < p; ++q) {
        const auto& blocks = per_rank[q];
        const bool last = q + 1 == p;
        const std::size_t expected = (q == 0 ? 2 : 5) + (last ? 0 : 1);
        if (blocks.size() != expected) {
            throw Error(Errc::ShapeMismatch, "rank " + std::to_string(q) + " sent " +
                                                 std::to_string(blocks.size()) +
                                                 " boundary blocks, expected " +
                                                 std::to_string(expected));
        }
        std::size_t k = 0;
        if (q == 0) {
            r.diag[0] = blocks[k++];
            r.arrow[0] = blocks[k++];
        } else {
            r.diag[2 * q - 1] = blocks[k++];
            r.arrow[2 * q - 1] = blocks[k++];
            r.diag[2 * q] = blocks[k++];
            r.arrow[2 * q] = blocks[k++];
            r.lower[2 * q - 1] = blocks[k++];
        }
        if (!last) {
            r.lower[2 * q] = blocks[k++];
        }
    }
    r.tip = tip;
    validate(r);
    return r;
}

std::vector<BoundaryInverse> split_reduced_inverse(const SelectedInverse& xr) {
    if (xr.n % 2 == 0) {
        throw Error(Errc::ShapeMismatch, "a reduced system has an odd number of blocks");
    }
    const std::size_t p = (xr.n + 1) / 2;
    std::vector<BoundaryInverse> out(p);
    for (std::size_t q = 0; q < p; ++q) {
        auto& bi = out[q];
        const bool last = q + 1 == p;
        if (q == 0) {
            bi.last_diag = xr.diag[0];
            bi.last_arrow = xr.arrow[0];
        } else {
            bi.first_diag = xr.diag[2 * q - 1];
            bi.first_arrow = xr.arrow[2 * q - 1];
            bi.last_diag = xr.diag[2 * q];
            bi.last_arrow = xr.arrow[2 * q];
            bi.inner_coupling = xr.lower[2 * q - 1];
        }
        if (!last) {
            bi.next_coupling = xr.lower[2 * q];
        }
        bi.tip = xr.tip;
    }
    return out;
}

std::vector<Block> pack(const BoundaryInverse& bi) {
    return {bi.first_diag,     bi.first_arrow,   bi.last_diag, bi.last_arrow,
            bi.inner_coupling, bi.next_coupling, bi.tip};
}

BoundaryInverse unpack_boundary(std::vector<Block> blocks, bool middle, bool last) {
    if (blocks.size() != 7) {
        throw Error(Errc::ShapeMismatch, "boundary inverse needs 7 blocks");
    }
    BoundaryInverse bi{std::move(blocks[0]), std::move(blocks[1]), std::move(blocks[2]),
                       std::move(blocks[3]), std::move(blocks[4]), std::move(blocks[5]),
                       std::move(blocks[6])};
    if (middle && bi.first_diag.empty() && !bi.last_diag.empty()) {
        throw Error(Errc::ShapeMismatch, "middle partition is missing its first boundary");
    }
    if (!last && bi.next_coupling.empty() && !bi.last_diag.empty()) {
        throw Error(Errc::ShapeMismatch, "missing coupling to the next partition");
    }
    return bi;
}

namespace {

PartitionInverse empty_inverse(const PartitionFactor& f) {
    const std::size_t m = f.diag.size();
    PartitionInverse x;
    x.range = f.range;
    x.diag.resize(m);
    x.lower.resize(m - 1);
    x.arrow.resize(m);
    return x;
}

}  // namespace

PartitionInverse partial_pobtasi(const PartitionFactor& f, const BoundaryInverse& bi,
                                 KernelLedger* ledger) {
    if (f.middle) {
        throw Error(Errc::ShapeMismatch, "partial_pobtasi runs on the top partition");
    }
    const std::size_t m = f.diag.size();
    PartitionInverse x = empty_inverse(f);
    x.diag[m - 1] = bi.last_diag;
    x.arrow[m - 1] = bi.last_arrow;
    detail::backward_leading(f.diag, f.lower, f.arrow, bi.tip, x.diag, x.lower, x.arrow, m,
                             ledger);
    x.next_coupling = bi.next_coupling;
    return x;
}

PartitionInverse permuted_pobtasi(const PartitionFactor& f, const BoundaryInverse& bi,
                                  KernelLedger* ledger) {
    if (!f.middle) {
        throw Error(Errc::ShapeMismatch, "permuted_pobtasi runs on a middle partition");
    }
    const std::size_t m = f.diag.size();
    const std::size_t b = f.diag[0].rows();
    PartitionInverse x = empty_inverse(f);
    x.diag[0] = bi.first_diag;
    x.arrow[0] = bi.first_arrow;
    x.diag[m - 1] = bi.last_diag;
    x.arrow[m - 1] = bi.last_arrow;

    // X(local 0, column i+1), starting from the reduced system's coupling.
    Block row0 = bi.inner_coupling.transposed();
    for (std::size_t i = m - 2; i >= 1; --i) {
        Block s = vstack(f.lower[i], f.fill_in[i]);
        Block xs(2 * b, 2 * b);
        place(xs, x.diag[i + 1], 0, 0);
        place(xs, row0.transposed(), 0, b);
        place(xs, row0, b, 0);
        place(xs, x.diag[0], b, b);
        Block xn = hstack(x.arrow[i + 1], x.arrow[0]);
        detail::ColumnInverse c =
            detail::invert_column(f.diag[i], s, f.arrow[i], xs, xn, bi.tip, ledger);
        x.lower[i] = row_range(c.col, 0, b);
        row0 = row_range(c.col, b, b);
        x.arrow[i] = std::move(c.arrow);
        x.diag[i] = std::move(c.diag);
    }
    x.lower[0] = row0.transposed();
    x.next_coupling = bi.next_coupling;
    return x;
}

SelectedInverse merge_partitions(const std::vector<PartitionInverse>& parts, const Block& tip,
                                 std::size_t n, std::size_t b, std::size_t a) {
    SelectedInverse x = BtaMatrix::zeros(n, b, a);
    std::size_t covered = 0;
    for (const auto& part : parts) {
        if (part.range.begin != covered || part.range.end > n) {
            throw Error(Errc::ShapeMismatch, "partitions do not tile the matrix");
        }
        const std::size_t s = part.range.begin;
        for (std::size_t k = 0; k < part.diag.size(); ++k) {
            x.diag[s + k] = part.diag[k];
            x.arrow[s + k] = part.arrow[k];
        }
        for (std::size_t k = 0; k < part.lower.size(); ++k) {
            x.lower[s + k] = part.lower[k];
        }
        if (part.range.end < n) {
            x.lower[part.range.end - 1] = part.next_coupling;
        }
        covered = part.range.end;
    }
    if (covered != n) {
        throw Error(Errc::ShapeMismatch, "partitions do not cover the matrix");
    }
    x.tip = tip;
    return x;
}

SelectedInverse pobtarssi(const BtaMatrix& reduced, KernelLedger* ledger) {
    return selinv(reduced, ledger);
}

}  // namespace serinv
