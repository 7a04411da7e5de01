#include "serinv/sequential.hpp"

#include "columns.hpp"
#include "serinv/kernels.hpp"

namespace serinv {

BtaFactor pobtaf(const BtaMatrix& a, KernelLedger* ledger) {
    validate(a);
    BtaFactor f;
    f.l = a;
    auto& l = f.l;
    Block update(a.a, a.a);
    detail::forward_leading(l.diag, l.lower, l.arrow, update, a.n, 0, ledger);

    Block tip = a.tip;
    if (a.n > 1) {
        for (std::size_t k = 0; k < tip.size(); ++k) {
            tip.values()[k] += update.values()[k];
        }
    }
    Block none_s(0, a.b), none_w(0, 0), none_r(a.a, 0);
    try {
        detail::eliminate_column(l.diag[a.n - 1], none_s, l.arrow[a.n - 1], none_w, none_r, tip,
                                 ledger);
    } catch (const Error& e) {
        throw e.with_block(a.n - 1);
    }
    try {
        l.tip = chol_lower(tip, ledger, ShapeClass::A3);
    } catch (const Error& e) {
        throw e.with_block(a.n);
    }
    return f;
}

SelectedInverse pobtasi(const BtaFactor& factor, KernelLedger* ledger) {
    const BtaMatrix& l = factor.l;
    SelectedInverse x = BtaMatrix::zeros(l.n, l.b, l.a);
    x.tip = detail::invert_tip(l.tip, ledger);

    const std::size_t last = l.n - 1;
    detail::ColumnInverse c = detail::invert_column(
        l.diag[last], Block(0, l.b), l.arrow[last], Block(0, 0), Block(l.a, 0), x.tip, ledger);
    x.arrow[last] = std::move(c.arrow);
    x.diag[last] = std::move(c.diag);

    detail::backward_leading(l.diag, l.lower, l.arrow, x.tip, x.diag, x.lower, x.arrow, l.n,
                             ledger);
    return x;
}

SelectedInverse selinv(const BtaMatrix& a, KernelLedger* ledger) {
    return pobtasi(pobtaf(a, ledger), ledger);
}

}  // namespace serinv
