#pragma once

#include "serinv/block.hpp"
#include "serinv/ledger.hpp"

namespace serinv {

enum class Trans { No, Yes };

// Every kernel takes an optional ledger and the shape class to book the call
// under. Calls with an empty output are skipped and not booked, which is how
// a = 0 drops the arrowhead work.

// Lower Cholesky factor of the lower triangle of s. Throws NotPositiveDefinite
// with the failing pivot row.
Block chol_lower(const Block& s, KernelLedger* ledger = nullptr,
                 ShapeClass shape = ShapeClass::B3);

// X = B * L^-T, i.e. the solution of X * L^T = B.
Block solve_lower_right(const Block& l, const Block& b, KernelLedger* ledger = nullptr,
                        ShapeClass shape = ShapeClass::B3);

// L^-1, lower triangular. Booked as a TRSM against the identity.
Block invert_lower(const Block& l, KernelLedger* ledger = nullptr,
                   ShapeClass shape = ShapeClass::B3);

// c = beta * c + alpha * op(a) * op(b)
void gemm_acc(Block& c, const Block& a, const Block& b, double alpha, double beta,
              Trans ta = Trans::No, Trans tb = Trans::No, KernelLedger* ledger = nullptr,
              ShapeClass shape = ShapeClass::B3);

// alpha * op(a) * op(b)
Block gemm(const Block& a, const Block& b, double alpha = 1.0, Trans ta = Trans::No,
           Trans tb = Trans::No, KernelLedger* ledger = nullptr,
           ShapeClass shape = ShapeClass::B3);

// "portable" or "openblas".
const char* kernel_backend();

}  // namespace serinv
