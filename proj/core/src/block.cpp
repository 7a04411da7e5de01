#include "serinv/block.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "serinv/error.hpp"

namespace serinv {

Block Block::identity(std::size_t n) {
    Block id(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        id(i, i) = 1.0;
    }
    return id;
}

Block Block::transposed() const {
    Block t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

double max_abs(const Block& x) {
    double m = 0.0;
    for (double v : x.values()) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double max_abs_diff(const Block& x, const Block& y) {
    if (!x.same_shape(y)) {
        throw Error(Errc::ShapeMismatch, "blocks differ in shape");
    }
    double m = 0.0;
    auto xv = x.values();
    auto yv = y.values();
    for (std::size_t i = 0; i < xv.size(); ++i) {
        m = std::max(m, std::abs(xv[i] - yv[i]));
    }
    return m;
}

bool bit_equal(const Block& x, const Block& y) {
    return x.same_shape(y) &&
           (x.size() == 0 ||
            std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
}

Block vstack(const Block& top, const Block& bottom) {
    if (top.cols() != bottom.cols()) {
        throw Error(Errc::ShapeMismatch, "vstack column counts differ");
    }
    Block out(top.rows() + bottom.rows(), top.cols());
    std::copy(top.values().begin(), top.values().end(), out.values().begin());
    std::copy(bottom.values().begin(), bottom.values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(top.size()));
    return out;
}

Block hstack(const Block& left, const Block& right) {
    if (left.rows() != right.rows()) {
        throw Error(Errc::ShapeMismatch, "hstack row counts differ");
    }
    Block out(left.rows(), left.cols() + right.cols());
    place(out, left, 0, 0);
    place(out, right, 0, left.cols());
    return out;
}

Block row_range(const Block& x, std::size_t begin, std::size_t count) {
    if (begin + count > x.rows()) {
        throw Error(Errc::ShapeMismatch, "row range out of bounds");
    }
    Block out(count, x.cols());
    std::copy_n(x.data() + begin * x.cols(), count * x.cols(), out.data());
    return out;
}

Block col_range(const Block& x, std::size_t begin, std::size_t count) {
    if (begin + count > x.cols()) {
        throw Error(Errc::ShapeMismatch, "column range out of bounds");
    }
    Block out(x.rows(), count);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        std::copy_n(x.data() + i * x.cols() + begin, count, out.data() + i * count);
    }
    return out;
}

void place(Block& dst, const Block& src, std::size_t row, std::size_t col) {
    if (row + src.rows() > dst.rows() || col + src.cols() > dst.cols()) {
        throw Error(Errc::ShapeMismatch, "placement out of bounds");
    }
    for (std::size_t i = 0; i < src.rows(); ++i) {
        std::copy_n(src.data() + i * src.cols(), src.cols(),
                    dst.data() + (row + i) * dst.cols() + col);
    }
}

}  // namespace serinv
