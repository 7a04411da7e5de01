#pragma once

#include <vector>

#include "serinv/bta.hpp"
#include "serinv/ledger.hpp"

namespace serinv {

// Lower block-Cholesky factor in the BTA layout. fill_in and tip_update are
// only populated for middle partitions of a distributed run.
struct BtaFactor {
    BtaMatrix l;
    std::vector<Block> fill_in;
    Block tip_update;
};

// Inputs are preserved; results are fresh.
BtaFactor pobtaf(const BtaMatrix& a, KernelLedger* ledger = nullptr);
SelectedInverse pobtasi(const BtaFactor& factor, KernelLedger* ledger = nullptr);
SelectedInverse selinv(const BtaMatrix& a, KernelLedger* ledger = nullptr);

}  // namespace serinv
