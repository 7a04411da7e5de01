#include "serinv/analysis.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace serinv {

std::string_view routine_name(Routine r) {
    switch (r) {
        case Routine::Pobtaf: return "POBTAF";
        case Routine::Pobtasi: return "POBTASI";
        case Routine::Ppobtaf: return "PPOBTAF";
        case Routine::Pobtarssi: return "POBTARSSI";
        case Routine::Ppobtasi: return "PPOBTASI";
    }
    return "?";
}

namespace {

// Calls and flops per (kernel, shape). Flops are kept in thirds so every
// entry is an integer and sums are exact.
struct Tally {
    std::array<std::uint64_t, 12> calls{};
    std::array<double, 12> thirds{};

    static std::size_t slot(KernelKind k, ShapeClass s) {
        return static_cast<std::size_t>(k) * 4 + static_cast<std::size_t>(s);
    }
    void add(KernelKind k, ShapeClass s, std::uint64_t count, double thirds_each) {
        if (count == 0) return;
        calls[slot(k, s)] += count;
        thirds[slot(k, s)] += static_cast<double>(count) * thirds_each;
    }
    void add(const Tally& o, std::uint64_t times = 1) {
        for (std::size_t i = 0; i < calls.size(); ++i) {
            calls[i] += o.calls[i] * times;
            thirds[i] += o.thirds[i] * static_cast<double>(times);
        }
    }
    double total_thirds() const {
        double t = 0.0;
        for (double v : thirds) t += v;
        return t;
    }
    KernelLedger ledger() const {
        KernelLedger l;
        for (auto k : kAllKernels) {
            for (auto s : kAllShapes) {
                if (calls[slot(k, s)] > 0) l.add(k, s, calls[slot(k, s)], thirds[slot(k, s)] / 3.0);
            }
        }
        return l;
    }
};

struct Dims {
    double b;
    double a;
    bool arrow;
};

double volume(ShapeClass s, const Dims& d) {
    switch (s) {
        case ShapeClass::B3: return d.b * d.b * d.b;
        case ShapeClass::AB2: return d.a * d.b * d.b;
        case ShapeClass::A2B: return d.a * d.a * d.b;
        case ShapeClass::A3: return d.a * d.a * d.a;
    }
    return 0.0;
}

// Mirrors detail::eliminate_column with k stacked neighbour blocks.
Tally forward_column(std::size_t k, const Dims& d) {
    const double kb = static_cast<double>(k) * d.b, b = d.b, a = d.a;
    Tally t;
    t.add(KernelKind::Potrf, ShapeClass::B3, 1, b * b * b);
    if (k) t.add(KernelKind::Trsm, ShapeClass::B3, 1, 3 * kb * b * b);
    if (d.arrow) t.add(KernelKind::Trsm, ShapeClass::AB2, 1, 3 * a * b * b);
    if (k) t.add(KernelKind::Gemm, ShapeClass::B3, 1, 6 * kb * kb * b);
    if (k && d.arrow) t.add(KernelKind::Gemm, ShapeClass::AB2, 1, 6 * a * kb * b);
    if (d.arrow) t.add(KernelKind::Gemm, ShapeClass::A2B, 1, 6 * a * a * b);
    return t;
}

// Mirrors detail::invert_column.
Tally backward_column(std::size_t k, const Dims& d) {
    const double kb = static_cast<double>(k) * d.b, b = d.b, a = d.a;
    Tally t;
    t.add(KernelKind::Trsm, ShapeClass::B3, 1, 3 * b * b * b);
    if (k) t.add(KernelKind::Gemm, ShapeClass::B3, 1, 6 * kb * kb * b);
    if (k && d.arrow) t.add(KernelKind::Gemm, ShapeClass::AB2, 1, 6 * kb * a * b);
    if (k) t.add(KernelKind::Gemm, ShapeClass::B3, 1, 6 * kb * b * b);
    if (k && d.arrow) t.add(KernelKind::Gemm, ShapeClass::AB2, 1, 6 * a * kb * b);
    if (d.arrow) t.add(KernelKind::Gemm, ShapeClass::A2B, 1, 6 * a * a * b);
    if (d.arrow) t.add(KernelKind::Gemm, ShapeClass::AB2, 1, 6 * a * b * b);
    if (k) t.add(KernelKind::Gemm, ShapeClass::B3, 1, 6 * b * kb * b);
    if (d.arrow) t.add(KernelKind::Gemm, ShapeClass::AB2, 1, 6 * b * a * b);
    t.add(KernelKind::Gemm, ShapeClass::B3, 1, 6 * b * b * b);
    return t;
}

Tally impl_pobtaf(std::size_t n, const Dims& d) {
    Tally t;
    t.add(forward_column(1, d), n - 1);
    t.add(forward_column(0, d));
    if (d.arrow) t.add(KernelKind::Potrf, ShapeClass::A3, 1, d.a * d.a * d.a);
    return t;
}

Tally impl_pobtasi(std::size_t n, const Dims& d) {
    Tally t;
    if (d.arrow) {
        t.add(KernelKind::Trsm, ShapeClass::A3, 1, 3 * d.a * d.a * d.a);
        t.add(KernelKind::Gemm, ShapeClass::A3, 1, 6 * d.a * d.a * d.a);
    }
    t.add(backward_column(0, d));
    t.add(backward_column(1, d), n - 1);
    return t;
}

double kernel_factor(KernelKind k) {
    switch (k) {
        case KernelKind::Potrf: return 1.0;
        case KernelKind::Trsm: return 3.0;
        case KernelKind::Gemm: return 6.0;
    }
    return 0.0;
}

Tally reference_counts(Routine routine, std::size_t n, std::size_t np, std::size_t p, const Dims& d) {
    struct Row {
        KernelKind k;
        ShapeClass s;
        std::uint64_t c;
    };
    using K = KernelKind;
    using S = ShapeClass;
    std::vector<Row> rows;
    switch (routine) {
        case Routine::Pobtaf:
            rows = {{K::Potrf, S::A3, 1},     {K::Potrf, S::B3, n},    {K::Gemm, S::A2B, n},
                    {K::Gemm, S::AB2, n - 1}, {K::Gemm, S::B3, n - 1}, {K::Trsm, S::AB2, n},
                    {K::Trsm, S::B3, n - 1}};
            break;
        case Routine::Pobtasi:
            rows = {{K::Gemm, S::A3, 1},      {K::Gemm, S::A2B, n - 1}, {K::Gemm, S::AB2, n - 1},
                    {K::Gemm, S::B3, n - 1},  {K::Trsm, S::AB2, 1},     {K::Trsm, S::B3, n - 1}};
            break;
        case Routine::Ppobtaf:
            rows = {{K::Potrf, S::B3, np - 2}, {K::Gemm, S::A2B, np - 2}, {K::Gemm, S::AB2, np - 2},
                    {K::Gemm, S::B3, np - 2},  {K::Trsm, S::AB2, np - 2}, {K::Trsm, S::B3, np - 2}};
            break;
        case Routine::Pobtarssi:
            rows = {{K::Potrf, S::A3, 1},         {K::Potrf, S::B3, 2 * p - 1},
                    {K::Gemm, S::A3, 1},          {K::Gemm, S::A2B, 4 * p - 3},
                    {K::Gemm, S::AB2, 4 * p - 4}, {K::Gemm, S::B3, 4 * p - 4},
                    {K::Trsm, S::AB2, 2 * p},     {K::Trsm, S::B3, 4 * p - 4}};
            break;
        case Routine::Ppobtasi:
            rows = {{K::Gemm, S::A2B, np - 2}, {K::Gemm, S::AB2, np - 2}, {K::Gemm, S::B3, np - 2},
                    {K::Trsm, S::B3, np - 2}};
            break;
    }
    Tally t;
    for (const auto& r : rows) {
        if (!d.arrow && r.s != ShapeClass::B3) continue;
        t.add(r.k, r.s, r.c, kernel_factor(r.k) * volume(r.s, d));
    }
    return t;
}

// Re-weights a tally so each call counts its class volume.
Tally unit_volume(const Tally& t, const Dims& d) {
    Tally out = t;
    for (auto k : kAllKernels) {
        for (auto s : kAllShapes) {
            auto i = Tally::slot(k, s);
            out.thirds[i] = static_cast<double>(t.calls[i]) * 3.0 * volume(s, d);
        }
    }
    return out;
}

Tally routine_tally(Routine routine, std::size_t n, std::size_t b, std::size_t a, int ranks,
                    CountSource source, Weighting weighting) {
    if (n < 1 || b < 1 || ranks < 1) {
        throw Error(Errc::InfeasibleParameters, "need n >= 1, b >= 1 and P >= 1");
    }
    const Dims d{static_cast<double>(b), static_cast<double>(a), a > 0};
    const auto p = static_cast<std::size_t>(ranks);
    const std::size_t np = n / p;
    const bool per_rank = routine == Routine::Ppobtaf || routine == Routine::Ppobtasi;
    if (per_rank && (p < 2 || np < 3)) {
        throw Error(Errc::InfeasibleParameters,
                    "a middle rank needs P >= 2 and at least 3 blocks (n / P >= 3)");
    }
    Tally t;
    if (source == CountSource::Reference) {
        t = reference_counts(routine, n, np, p, d);
    } else {
        switch (routine) {
            case Routine::Pobtaf: t = impl_pobtaf(n, d); break;
            case Routine::Pobtasi: t = impl_pobtasi(n, d); break;
            case Routine::Ppobtaf: t.add(forward_column(2, d), np - 2); break;
            case Routine::Ppobtasi: t.add(backward_column(2, d), np - 2); break;
            case Routine::Pobtarssi:
                t = impl_pobtaf(2 * p - 1, d);
                t.add(impl_pobtasi(2 * p - 1, d));
                break;
        }
    }
    return weighting == Weighting::UnitVolume ? unit_volume(t, d) : t;
}

Tally rank_tally(Phase phase, const PartitionPlan& plan, int rank, const Dims& d) {
    const auto r = static_cast<std::size_t>(rank);
    const std::size_t m = plan.ranges.at(r).size();
    const bool middle = rank > 0;
    Tally t;
    switch (phase) {
        case Phase::Forward:
            t.add(forward_column(middle ? 2 : 1, d), middle ? m - 2 : m - 1);
            break;
        case Phase::Backward:
            t.add(backward_column(middle ? 2 : 1, d), middle ? m - 2 : m - 1);
            break;
        case Phase::Reduced:
            if (!middle) {
                const auto nr = 2 * static_cast<std::size_t>(plan.ranks) - 1;
                t = impl_pobtaf(nr, d);
                t.add(impl_pobtasi(nr, d));
            }
            break;
    }
    return t;
}

}  // namespace

KernelLedger predicted_counts(Routine routine, std::size_t n, std::size_t b, std::size_t a,
                              int ranks, CountSource source, Weighting weighting) {
    return routine_tally(routine, n, b, a, ranks, source, weighting).ledger();
}

double flop_count(Routine routine, std::size_t n, std::size_t b, std::size_t a, int ranks,
                  CountSource source, Weighting weighting) {
    return routine_tally(routine, n, b, a, ranks, source, weighting).total_thirds() / 3.0;
}

KernelLedger predicted_rank_counts(Phase phase, const PartitionPlan& plan, int rank,
                                   std::size_t b, std::size_t a) {
    const Dims d{static_cast<double>(b), static_cast<double>(a), a > 0};
    return rank_tally(phase, plan, rank, d).ledger();
}

LoadBalance ideal_load_balance(std::size_t n, std::size_t b, std::size_t a) {
    if (n < 4 || b < 1) {
        throw Error(Errc::InfeasibleParameters, "load balancing needs n >= 4 and b >= 1");
    }
    const Dims d{static_cast<double>(b), static_cast<double>(a), a > 0};
    const double top_f = forward_column(1, d).total_thirds();
    const double mid_f = forward_column(2, d).total_thirds();
    const double top_b = backward_column(1, d).total_thirds();
    const double mid_b = backward_column(2, d).total_thirds();
    const double nn = static_cast<double>(n);

    // A top partition of r n blocks eliminates r n - 1 columns, a middle
    // partition of n blocks eliminates n - 2. Solve top = middle for r.
    auto balance = [&](double top, double mid) { return ((nn - 2.0) * mid / top + 1.0) / nn; };

    LoadBalance lb;
    lb.forward = balance(top_f, mid_f);
    lb.backward = balance(top_b, mid_b);
    lb.forward_weight = mid_f / (mid_f + mid_b);
    lb.ratio = lb.forward_weight * lb.forward + (1.0 - lb.forward_weight) * lb.backward;
    return lb;
}

double theoretical_efficiency(std::size_t n, std::size_t b, std::size_t a, int ranks,
                              double ratio) {
    PartitionPlan plan;
    try {
        plan = plan_partitions(n, ranks, ratio);
    } catch (const Error& e) {
        throw Error(Errc::InfeasibleParameters, e.what());
    }
    if (b < 1) {
        throw Error(Errc::InfeasibleParameters, "b must be at least 1");
    }
    const Dims d{static_cast<double>(b), static_cast<double>(a), a > 0};
    Tally seq = impl_pobtaf(n, d);
    seq.add(impl_pobtasi(n, d));
    double busiest = 0.0;
    for (int r = 0; r < ranks; ++r) {
        Tally t = rank_tally(Phase::Forward, plan, r, d);
        t.add(rank_tally(Phase::Reduced, plan, r, d));
        t.add(rank_tally(Phase::Backward, plan, r, d));
        busiest = std::max(busiest, t.total_thirds());
    }
    return seq.total_thirds() / (static_cast<double>(ranks) * busiest);
}

nlohmann::json model_report(std::size_t n, std::size_t b, std::size_t a, int ranks,
                            double ratio) {
    nlohmann::json out;
    out["schema"] = "serinv.model/1";
    out["params"] = {{"n", n}, {"b", b}, {"a", a}, {"P", ranks}, {"ratio", ratio}};

    auto routines = nlohmann::json::array();
    for (auto r : {Routine::Pobtaf, Routine::Pobtasi, Routine::Ppobtaf, Routine::Pobtarssi,
                   Routine::Ppobtasi}) {
        nlohmann::json row{{"routine", routine_name(r)}};
        try {
            row["flops"] = flop_count(r, n, b, a, ranks);
            row["flops_reference"] = flop_count(r, n, b, a, ranks, CountSource::Reference);
            row["kernel_ledger"] = predicted_counts(r, n, b, a, ranks).to_json();
        } catch (const Error& e) {
            row["error"] = e.what();
        }
        routines.push_back(row);
    }
    out["routines"] = routines;

    if (n >= 4) {
        auto lb = ideal_load_balance(n, b, a);
        out["load_balance"] = {{"ppobtaf", lb.forward},
                               {"ppobtasi", lb.backward},
                               {"ppobtaf_weight", lb.forward_weight},
                               {"r_lb", lb.ratio}};
    }

    auto over_p = nlohmann::json::array();
    for (int p = 1; p <= std::max(ranks, 1) && static_cast<std::size_t>(3 * p) <= n; p *= 2) {
        over_p.push_back({{"P", p}, {"n", n}, {"efficiency", theoretical_efficiency(n, b, a, p, ratio)}});
    }
    out["efficiency_over_P"] = over_p;

    auto over_n = nlohmann::json::array();
    for (std::size_t nn = 32; nn <= std::max<std::size_t>(n, 32); nn *= 2) {
        if (nn < 3 * static_cast<std::size_t>(ranks)) continue;
        over_n.push_back(
            {{"P", ranks}, {"n", nn}, {"efficiency", theoretical_efficiency(nn, b, a, ranks, ratio)}});
    }
    out["efficiency_over_n"] = over_n;
    return out;
}

}  // namespace serinv
