#include "serinv/ledger.hpp"

namespace serinv {

std::string_view kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::Potrf: return "POTRF";
        case KernelKind::Trsm: return "TRSM";
        case KernelKind::Gemm: return "GEMM";
    }
    return "?";
}

std::string_view shape_name(ShapeClass shape) {
    switch (shape) {
        case ShapeClass::B3: return "b3";
        case ShapeClass::AB2: return "ab2";
        case ShapeClass::A2B: return "a2b";
        case ShapeClass::A3: return "a3";
    }
    return "?";
}

std::size_t KernelLedger::slot(KernelKind kind, ShapeClass shape) {
    return static_cast<std::size_t>(kind) * kAllShapes.size() + static_cast<std::size_t>(shape);
}

void KernelLedger::record(KernelKind kind, ShapeClass shape, double flops, double seconds) {
    auto& e = entries_[slot(kind, shape)];
    e.calls += 1;
    e.flops += flops;
    e.seconds += seconds;
}

void KernelLedger::add(KernelKind kind, ShapeClass shape, std::uint64_t calls, double flops) {
    auto& e = entries_[slot(kind, shape)];
    e.calls += calls;
    e.flops += flops;
}

const LedgerEntry& KernelLedger::entry(KernelKind kind, ShapeClass shape) const {
    return entries_[slot(kind, shape)];
}

std::uint64_t KernelLedger::total_calls() const {
    std::uint64_t s = 0;
    for (const auto& e : entries_) s += e.calls;
    return s;
}

double KernelLedger::total_flops() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.flops;
    return s;
}

double KernelLedger::total_seconds() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.seconds;
    return s;
}

void KernelLedger::merge(const KernelLedger& other) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i].calls += other.entries_[i].calls;
        entries_[i].flops += other.entries_[i].flops;
        entries_[i].seconds += other.entries_[i].seconds;
    }
}

nlohmann::json KernelLedger::to_json() const {
    auto rows = nlohmann::json::array();
    for (auto kind : kAllKernels) {
        for (auto shape : kAllShapes) {
            const auto& e = entry(kind, shape);
            if (e.calls == 0) continue;
            rows.push_back({{"kernel", kernel_name(kind)},
                            {"shape_class", shape_name(shape)},
                            {"calls", e.calls},
                            {"flops", e.flops},
                            {"seconds", e.seconds}});
        }
    }
    return rows;
}

}  // namespace serinv
