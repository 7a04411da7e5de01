#pragma once

#include <vector>

#include "serinv/block.hpp"
#include "serinv/ledger.hpp"

// Single block-column steps shared by the sequential and partitioned passes.
//
// A column i couples to k*b "neighbour" rows (k = 1 for the next diagonal
// block, k = 2 when a middle partition also carries the fill-in row of its
// first block, k = 0 for the last column) and to the arrow row. The
// neighbour rows are stacked into one operand so every step issues the same
// kernel sequence regardless of k.
namespace serinv::detail {

// On entry d, s, arrow hold Schur-complement values of column i; on exit they
// hold the factor blocks. w (kb x kb), r (a x kb) and tip are downdated.
void eliminate_column(Block& d, Block& s, Block& arrow, Block& w, Block& r, Block& tip,
                      KernelLedger* ledger);

struct ColumnInverse {
    Block col;    // kb x b, inverse blocks on the neighbour rows
    Block arrow;  // a x b
    Block diag;   // b x b
};

// xs (kb x kb) and xn (a x kb) are the inverse blocks coupling the neighbour
// rows among themselves and to the arrow; x_tip is the inverse tip.
ColumnInverse invert_column(const Block& l, const Block& s, const Block& l_arrow,
                            const Block& xs, const Block& xn, const Block& x_tip,
                            KernelLedger* ledger);

// X_tip = L_tip^-T L_tip^-1
Block invert_tip(const Block& l_tip, KernelLedger* ledger);

// Column loop of a leading (top) block range: eliminates local columns
// 0..count-2 and leaves column count-1 as a Schur complement. `offset` is the
// global index of local block 0, used in error reports.
void forward_leading(std::vector<Block>& diag, std::vector<Block>& lower,
                     std::vector<Block>& arrow, Block& tip_update, std::size_t count,
                     std::size_t offset, KernelLedger* ledger);

// Inverse of local columns count-2..0 given the inverse blocks of column
// count-1 already stored in x_diag / x_arrow.
void backward_leading(const std::vector<Block>& l_diag, const std::vector<Block>& l_lower,
                      const std::vector<Block>& l_arrow, const Block& x_tip,
                      std::vector<Block>& x_diag, std::vector<Block>& x_lower,
                      std::vector<Block>& x_arrow, std::size_t count, KernelLedger* ledger);

}  // namespace serinv::detail
