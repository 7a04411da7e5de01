#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include <nlohmann/json.hpp>

namespace serinv {

enum class KernelKind { Potrf, Trsm, Gemm };

// Operand-shape class of a block operation, by the sizes that dominate it.
enum class ShapeClass { B3, AB2, A2B, A3 };

inline constexpr std::array<KernelKind, 3> kAllKernels = {KernelKind::Potrf, KernelKind::Trsm,
                                                          KernelKind::Gemm};
inline constexpr std::array<ShapeClass, 4> kAllShapes = {ShapeClass::B3, ShapeClass::AB2,
                                                         ShapeClass::A2B, ShapeClass::A3};

std::string_view kernel_name(KernelKind kind);
std::string_view shape_name(ShapeClass shape);

struct LedgerEntry {
    std::uint64_t calls = 0;
    double flops = 0.0;
    double seconds = 0.0;
};

// Call/FLOP/time tallies per (kernel, shape class). Each rank owns one.
class KernelLedger {
  public:
    void record(KernelKind kind, ShapeClass shape, double flops, double seconds);
    // Books `calls` calls at once (model predictions).
    void add(KernelKind kind, ShapeClass shape, std::uint64_t calls, double flops);

    const LedgerEntry& entry(KernelKind kind, ShapeClass shape) const;
    std::uint64_t calls(KernelKind kind, ShapeClass shape) const {
        return entry(kind, shape).calls;
    }
    double flops(KernelKind kind, ShapeClass shape) const { return entry(kind, shape).flops; }

    std::uint64_t total_calls() const;
    double total_flops() const;
    double total_seconds() const;

    void merge(const KernelLedger& other);
    void reset() { entries_ = {}; }

    // [{kernel, shape_class, calls, flops, seconds}], zero rows omitted.
    nlohmann::json to_json() const;

  private:
    static std::size_t slot(KernelKind kind, ShapeClass shape);
    std::array<LedgerEntry, 12> entries_{};
};

}  // namespace serinv
