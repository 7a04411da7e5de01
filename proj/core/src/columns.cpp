#include "columns.hpp"

#include "serinv/error.hpp"
#include "serinv/kernels.hpp"

namespace serinv::detail {

void eliminate_column(Block& d, Block& s, Block& arrow, Block& w, Block& r, Block& tip,
                      KernelLedger* ledger) {
    d = chol_lower(d, ledger, ShapeClass::B3);
    s = solve_lower_right(d, s, ledger, ShapeClass::B3);
    arrow = solve_lower_right(d, arrow, ledger, ShapeClass::AB2);
    gemm_acc(w, s, s, -1.0, 1.0, Trans::No, Trans::Yes, ledger, ShapeClass::B3);
    gemm_acc(r, arrow, s, -1.0, 1.0, Trans::No, Trans::Yes, ledger, ShapeClass::AB2);
    gemm_acc(tip, arrow, arrow, -1.0, 1.0, Trans::No, Trans::Yes, ledger, ShapeClass::A2B);
}

ColumnInverse invert_column(const Block& l, const Block& s, const Block& l_arrow,
                            const Block& xs, const Block& xn, const Block& x_tip,
                            KernelLedger* ledger) {
    const std::size_t b = l.rows();
    const Block linv = invert_lower(l, ledger, ShapeClass::B3);

    // Neighbour rows: (-Xs S - Xn^T L_arrow) L^-1
    Block u_col(s.rows(), b);
    gemm_acc(u_col, xs, s, -1.0, 1.0, Trans::No, Trans::No, ledger, ShapeClass::B3);
    gemm_acc(u_col, xn, l_arrow, -1.0, 1.0, Trans::Yes, Trans::No, ledger, ShapeClass::AB2);
    ColumnInverse out;
    out.col = gemm(u_col, linv, 1.0, Trans::No, Trans::No, ledger, ShapeClass::B3);

    // Arrow row: (-Xn S - X_tip L_arrow) L^-1
    Block u_arrow(l_arrow.rows(), b);
    gemm_acc(u_arrow, xn, s, -1.0, 1.0, Trans::No, Trans::No, ledger, ShapeClass::AB2);
    gemm_acc(u_arrow, x_tip, l_arrow, -1.0, 1.0, Trans::No, Trans::No, ledger, ShapeClass::A2B);
    out.arrow = gemm(u_arrow, linv, 1.0, Trans::No, Trans::No, ledger, ShapeClass::AB2);

    // Diagonal: (L^-T - X_col^T S - X_arrow^T L_arrow) L^-1
    Block u_diag = linv.transposed();
    gemm_acc(u_diag, out.col, s, -1.0, 1.0, Trans::Yes, Trans::No, ledger, ShapeClass::B3);
    gemm_acc(u_diag, out.arrow, l_arrow, -1.0, 1.0, Trans::Yes, Trans::No, ledger,
             ShapeClass::AB2);
    out.diag = gemm(u_diag, linv, 1.0, Trans::No, Trans::No, ledger, ShapeClass::B3);
    return out;
}

Block invert_tip(const Block& l_tip, KernelLedger* ledger) {
    const Block linv = invert_lower(l_tip, ledger, ShapeClass::A3);
    return gemm(linv, linv, 1.0, Trans::Yes, Trans::No, ledger, ShapeClass::A3);
}

void forward_leading(std::vector<Block>& diag, std::vector<Block>& lower,
                     std::vector<Block>& arrow, Block& tip_update, std::size_t count,
                     std::size_t offset, KernelLedger* ledger) {
    for (std::size_t i = 0; i + 1 < count; ++i) {
        try {
            eliminate_column(diag[i], lower[i], arrow[i], diag[i + 1], arrow[i + 1], tip_update,
                             ledger);
        } catch (const Error& e) {
            throw e.with_block(offset + i);
        }
    }
}

void backward_leading(const std::vector<Block>& l_diag, const std::vector<Block>& l_lower,
                      const std::vector<Block>& l_arrow, const Block& x_tip,
                      std::vector<Block>& x_diag, std::vector<Block>& x_lower,
                      std::vector<Block>& x_arrow, std::size_t count, KernelLedger* ledger) {
    for (std::size_t i = count - 1; i-- > 0;) {
        ColumnInverse c = invert_column(l_diag[i], l_lower[i], l_arrow[i], x_diag[i + 1],
                                        x_arrow[i + 1], x_tip, ledger);
        x_lower[i] = std::move(c.col);
        x_arrow[i] = std::move(c.arrow);
        x_diag[i] = std::move(c.diag);
    }
}

}  // namespace serinv::detail
