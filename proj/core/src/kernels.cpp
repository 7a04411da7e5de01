#include "serinv/kernels.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "serinv/error.hpp"

#ifdef SERINV_HAVE_BLAS
#include <cblas.h>
#include <lapacke.h>
#endif

namespace serinv {

namespace {

using Clock = std::chrono::steady_clock;

class Booking {
  public:
    Booking(KernelLedger* ledger, KernelKind kind, ShapeClass shape, double flops)
        : ledger_(ledger), kind_(kind), shape_(shape), flops_(flops) {
        if (ledger_) start_ = Clock::now();
    }
    void commit() {
        if (!ledger_) return;
        std::chrono::duration<double> dt = Clock::now() - start_;
        ledger_->record(kind_, shape_, flops_, dt.count());
    }

  private:
    KernelLedger* ledger_;
    KernelKind kind_;
    ShapeClass shape_;
    double flops_;
    Clock::time_point start_{};
};

void require_square(const Block& x, const char* what) {
    if (x.rows() != x.cols()) {
        throw Error(Errc::ShapeMismatch, std::string(what) + " needs a square block");
    }
}

void require_nonsingular(const Block& l) {
    for (std::size_t i = 0; i < l.rows(); ++i) {
        if (l(i, i) == 0.0) {
            Error e(Errc::SingularTriangular, "zero diagonal entry at row " + std::to_string(i));
            e.pivot = i;
            throw e;
        }
    }
}

#ifndef SERINV_HAVE_BLAS

Block op(const Block& x, Trans t) { return t == Trans::Yes ? x.transposed() : x; }

void chol_in_place(Block& l) {
    const std::size_t n = l.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = l(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            d -= l(j, k) * l(j, k);
        }
        if (!(d > 0.0)) {
            Error e(Errc::NotPositiveDefinite, "non-positive pivot at row " + std::to_string(j));
            e.pivot = j;
            throw e;
        }
        const double djj = std::sqrt(d);
        l(j, j) = djj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = l(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * l(j, k);
            }
            l(i, j) = s / djj;
        }
        for (std::size_t i = 0; i < j; ++i) {
            l(i, j) = 0.0;
        }
    }
}

void solve_rows(const Block& l, Block& x) {
    const std::size_t n = l.rows();
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double* row = x.data() + r * n;
        for (std::size_t j = 0; j < n; ++j) {
            double s = row[j];
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(j, k) * row[k];
            }
            row[j] = s / l(j, j);
        }
    }
}

void gemm_raw(Block& c, const Block& a, const Block& b, double alpha, double beta, Trans ta,
              Trans tb) {
    const Block oa = op(a, ta);
    const Block ob = op(b, tb);
    const std::size_t m = oa.rows(), k = oa.cols(), n = ob.cols();
    if (beta != 1.0) {
        for (double& v : c.values()) v = beta == 0.0 ? 0.0 : beta * v;
    }
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double s = alpha * oa(i, p);
            const double* brow = ob.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += s * brow[j];
            }
        }
    }
}

#else

void chol_in_place(Block& l) {
    const auto n = static_cast<lapack_int>(l.rows());
    lapack_int info = LAPACKE_dpotrf(LAPACK_ROW_MAJOR, 'L', n, l.data(), n);
    if (info > 0) {
        auto j = static_cast<std::size_t>(info - 1);
        Error e(Errc::NotPositiveDefinite, "non-positive pivot at row " + std::to_string(j));
        e.pivot = j;
        throw e;
    }
    if (info < 0) {
        throw Error(Errc::ShapeMismatch, "dpotrf rejected its arguments");
    }
    for (std::size_t i = 0; i < l.rows(); ++i) {
        for (std::size_t j = i + 1; j < l.cols(); ++j) l(i, j) = 0.0;
    }
}

void solve_rows(const Block& l, Block& x) {
    const auto n = static_cast<int>(l.rows());
    cblas_dtrsm(CblasRowMajor, CblasRight, CblasLower, CblasTrans, CblasNonUnit,
                static_cast<int>(x.rows()), n, 1.0, l.data(), n, x.data(), n);
}

void gemm_raw(Block& c, const Block& a, const Block& b, double alpha, double beta, Trans ta,
              Trans tb) {
    const auto m = static_cast<int>(c.rows());
    const auto n = static_cast<int>(c.cols());
    const auto k = static_cast<int>(ta == Trans::Yes ? a.rows() : a.cols());
    cblas_dgemm(CblasRowMajor, ta == Trans::Yes ? CblasTrans : CblasNoTrans,
                tb == Trans::Yes ? CblasTrans : CblasNoTrans, m, n, k, alpha, a.data(),
                static_cast<int>(a.cols()), b.data(), static_cast<int>(b.cols()), beta, c.data(),
                n);
}

#endif

}  // namespace

Block chol_lower(const Block& s, KernelLedger* ledger, ShapeClass shape) {
    require_square(s, "chol_lower");
    if (s.empty()) return Block(0, 0);
    const double n = static_cast<double>(s.rows());
    Booking booking(ledger, KernelKind::Potrf, shape, n * n * n / 3.0);
    Block l = s;
    chol_in_place(l);
    booking.commit();
    return l;
}

Block solve_lower_right(const Block& l, const Block& b, KernelLedger* ledger, ShapeClass shape) {
    require_square(l, "solve_lower_right");
    if (b.cols() != l.rows()) {
        throw Error(Errc::ShapeMismatch, "solve_lower_right: column count differs from L order");
    }
    if (b.empty()) return b;
    require_nonsingular(l);
    const double n = static_cast<double>(l.rows());
    Booking booking(ledger, KernelKind::Trsm, shape, static_cast<double>(b.rows()) * n * n);
    Block x = b;
    solve_rows(l, x);
    booking.commit();
    return x;
}

Block invert_lower(const Block& l, KernelLedger* ledger, ShapeClass shape) {
    require_square(l, "invert_lower");
    if (l.empty()) return l;
    require_nonsingular(l);
    const double n = static_cast<double>(l.rows());
    Booking booking(ledger, KernelKind::Trsm, shape, n * n * n);
    Block x = Block::identity(l.rows());
    solve_rows(l, x);
    Block inv = x.transposed();
    booking.commit();
    return inv;
}

void gemm_acc(Block& c, const Block& a, const Block& b, double alpha, double beta, Trans ta,
              Trans tb, KernelLedger* ledger, ShapeClass shape) {
    const std::size_t m = ta == Trans::Yes ? a.cols() : a.rows();
    const std::size_t k = ta == Trans::Yes ? a.rows() : a.cols();
    const std::size_t kb = tb == Trans::Yes ? b.cols() : b.rows();
    const std::size_t n = tb == Trans::Yes ? b.rows() : b.cols();
    if (k != kb || c.rows() != m || c.cols() != n) {
        throw Error(Errc::ShapeMismatch, "gemm operands are not conformable");
    }
    if (c.empty()) return;
    if (k == 0 || alpha == 0.0) {
        if (beta != 1.0) {
            for (double& v : c.values()) v = beta == 0.0 ? 0.0 : beta * v;
        }
        return;
    }
    Booking booking(ledger, KernelKind::Gemm, shape,
                    2.0 * static_cast<double>(m) * static_cast<double>(n) * static_cast<double>(k));
    gemm_raw(c, a, b, alpha, beta, ta, tb);
    booking.commit();
}

Block gemm(const Block& a, const Block& b, double alpha, Trans ta, Trans tb, KernelLedger* ledger,
           ShapeClass shape) {
    Block c(ta == Trans::Yes ? a.cols() : a.rows(), tb == Trans::Yes ? b.rows() : b.cols());
    gemm_acc(c, a, b, alpha, 0.0, ta, tb, ledger, shape);
    return c;
}

const char* kernel_backend() {
#ifdef SERINV_HAVE_BLAS
    return "openblas";
#else
    return "portable";
#endif
}

}  // namespace serinv
