#include "serinv/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace serinv {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrix as_eigen(const Block& d) {
    return Eigen::Map<const RowMatrix>(d.data(), static_cast<Eigen::Index>(d.rows()),
                                       static_cast<Eigen::Index>(d.cols()));
}

Block from_eigen(const RowMatrix& m) {
    Block out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    Eigen::Map<RowMatrix>(out.data(), m.rows(), m.cols()) = m;
    return out;
}

Eigen::LLT<RowMatrix> factor(const BtaMatrix& a) {
    Eigen::LLT<RowMatrix> llt(as_eigen(to_dense(a)));
    if (llt.info() != Eigen::Success) {
        throw Error(Errc::NotPositiveDefinite, "dense Cholesky of the expansion failed");
    }
    return llt;
}

}  // namespace

SelectedInverse dense_selected_inverse(const BtaMatrix& a) {
    auto llt = factor(a);
    const auto dim = static_cast<Eigen::Index>(a.dimension());
    RowMatrix inv = llt.solve(RowMatrix::Identity(dim, dim));
    return extract_pattern(from_eigen(inv), a.n, a.b, a.a);
}

Block dense_cholesky(const BtaMatrix& a) {
    auto llt = factor(a);
    return from_eigen(llt.matrixL().toDenseMatrix());
}

double dense_min_eigenvalue(const BtaMatrix& a) {
    Eigen::SelfAdjointEigenSolver<RowMatrix> es(as_eigen(to_dense(a)), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace serinv
