#include <algorithm>
#include <cmath>
#include <random>

#include "serinv/bta.hpp"

namespace serinv {

BtaMatrix BtaMatrix::zeros(std::size_t n, std::size_t b, std::size_t a) {
    BtaMatrix m;
    m.n = n;
    m.b = b;
    m.a = a;
    m.diag.assign(n, Block(b, b));
    m.lower.assign(n > 0 ? n - 1 : 0, Block(b, b));
    m.arrow.assign(n, Block(a, b));
    m.tip = Block(a, a);
    return m;
}

BtaMatrix BtaMatrix::identity(std::size_t n, std::size_t b, std::size_t a) {
    BtaMatrix m = zeros(n, b, a);
    for (auto& d : m.diag) {
        d = Block::identity(b);
    }
    m.tip = Block::identity(a);
    return m;
}

namespace {

bool is_symmetric(const Block& x) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (x(i, j) != x(j, i)) {
                return false;
            }
        }
    }
    return true;
}

void check_blocks(std::vector<Diagnostic>& out, const std::vector<Block>& blocks,
                  std::size_t count, std::size_t rows, std::size_t cols,
                  const char* name) {
    if (blocks.size() != count) {
        out.push_back({Errc::ShapeMismatch, std::string(name) + ": expected " +
                                                std::to_string(count) + " blocks, found " +
                                                std::to_string(blocks.size())});
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].rows() != rows || blocks[i].cols() != cols) {
            out.push_back({Errc::ShapeMismatch,
                           std::string(name) + "[" + std::to_string(i) + "] is " +
                               std::to_string(blocks[i].rows()) + "x" +
                               std::to_string(blocks[i].cols()) + ", expected " +
                               std::to_string(rows) + "x" + std::to_string(cols)});
        }
    }
}

}  // namespace

std::vector<Diagnostic> diagnose(const BtaMatrix& m) {
    std::vector<Diagnostic> out;
    if (m.n < 1) {
        out.push_back({Errc::ShapeMismatch, "n must be at least 1"});
    }
    if (m.b < 1) {
        out.push_back({Errc::ShapeMismatch, "b must be at least 1"});
    }
    check_blocks(out, m.diag, m.n, m.b, m.b, "diag");
    check_blocks(out, m.lower, m.n > 0 ? m.n - 1 : 0, m.b, m.b, "lower");
    check_blocks(out, m.arrow, m.n, m.a, m.b, "arrow");
    if (m.tip.rows() != m.a || m.tip.cols() != m.a) {
        out.push_back({Errc::ShapeMismatch, "tip is not a x a"});
    }
    if (!out.empty() || !m.symmetric) {
        return out;
    }
    for (std::size_t i = 0; i < m.diag.size(); ++i) {
        if (!is_symmetric(m.diag[i])) {
            out.push_back({Errc::AsymmetryDetected,
                           "diag[" + std::to_string(i) + "] differs from its transpose"});
        }
    }
    if (!is_symmetric(m.tip)) {
        out.push_back({Errc::AsymmetryDetected, "tip differs from its transpose"});
    }
    return out;
}

void validate(const BtaMatrix& m) {
    auto found = diagnose(m);
    if (!found.empty()) {
        throw Error(found.front().code, found.front().message);
    }
}

namespace {

class UnitStream {
  public:
    explicit UnitStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) from the top 53 bits; independent of the standard
    // library's distribution implementations.
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

void fill_masked(UnitStream& rng, Block& x, double density) {
    for (double& v : x.values()) {
        double keep = rng.next();
        double value = 2.0 * rng.next() - 1.0;
        v = keep < density ? value : 0.0;
    }
}

void symmetrize(Block& x) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double s = 0.5 * (x(i, j) + x(j, i));
            x(i, j) = s;
            x(j, i) = s;
        }
    }
}

double row_abs(const Block& x, std::size_t row) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        s += std::abs(x(row, j));
    }
    return s;
}

double col_abs(const Block& x, std::size_t col) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        s += std::abs(x(i, col));
    }
    return s;
}

}  // namespace

BtaMatrix generate_spd_bta(std::uint64_t seed, std::size_t n, std::size_t b,
                           std::size_t a, double density) {
    if (!(density > 0.0 && density <= 1.0)) {
        throw Error(Errc::InvalidDensity, "density must lie in (0, 1]");
    }
    if (n < 1 || b < 1) {
        throw Error(Errc::ShapeMismatch, "n and b must be at least 1");
    }
    BtaMatrix m = BtaMatrix::zeros(n, b, a);
    UnitStream rng(seed);
    for (auto& d : m.diag) {
        fill_masked(rng, d, density);
        symmetrize(d);
    }
    for (auto& l : m.lower) {
        fill_masked(rng, l, density);
    }
    for (auto& r : m.arrow) {
        fill_masked(rng, r, density);
    }
    fill_masked(rng, m.tip, density);
    symmetrize(m.tip);

    // Row sums of the dense symmetric matrix, computed before any shift.
    std::vector<std::vector<double>> shift(n, std::vector<double>(b, 1.0));
    std::vector<double> tip_shift(a, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < b; ++r) {
            double s = row_abs(m.diag[i], r) + col_abs(m.arrow[i], r);
            if (i + 1 < n) {
                s += col_abs(m.lower[i], r);
            }
            if (i > 0) {
                s += row_abs(m.lower[i - 1], r);
            }
            shift[i][r] += s;
        }
        for (std::size_t r = 0; r < a; ++r) {
            tip_shift[r] += row_abs(m.arrow[i], r);
        }
    }
    for (std::size_t r = 0; r < a; ++r) {
        tip_shift[r] += row_abs(m.tip, r);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < b; ++r) {
            m.diag[i](r, r) += shift[i][r];
        }
    }
    for (std::size_t r = 0; r < a; ++r) {
        m.tip(r, r) += tip_shift[r];
    }
    return m;
}

Block to_dense(const BtaMatrix& m) {
    validate(m);
    const std::size_t nb = m.n * m.b;
    Block d(m.dimension(), m.dimension());
    for (std::size_t i = 0; i < m.n; ++i) {
        place(d, m.diag[i], i * m.b, i * m.b);
        place(d, m.arrow[i], nb, i * m.b);
        place(d, m.arrow[i].transposed(), i * m.b, nb);
        if (i + 1 < m.n) {
            place(d, m.lower[i], (i + 1) * m.b, i * m.b);
            place(d, m.lower[i].transposed(), i * m.b, (i + 1) * m.b);
        }
    }
    place(d, m.tip, nb, nb);
    return d;
}

namespace {

Block take(const Block& d, std::size_t row, std::size_t col, std::size_t rows,
           std::size_t cols) {
    Block out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            out(i, j) = d(row + i, col + j);
        }
    }
    return out;
}

}  // namespace

BtaMatrix extract_pattern(const Block& dense, std::size_t n, std::size_t b, std::size_t a) {
    const std::size_t dim = n * b + a;
    if (n < 1 || b < 1 || dense.rows() != dim || dense.cols() != dim) {
        throw Error(Errc::ShapeMismatch, "dense matrix size does not equal n*b + a");
    }
    BtaMatrix m = BtaMatrix::zeros(n, b, a);
    const std::size_t nb = n * b;
    for (std::size_t i = 0; i < n; ++i) {
        m.diag[i] = take(dense, i * b, i * b, b, b);
        m.arrow[i] = take(dense, nb, i * b, a, b);
        if (i + 1 < n) {
            m.lower[i] = take(dense, (i + 1) * b, i * b, b, b);
        }
    }
    m.tip = take(dense, nb, nb, a, a);
    return m;
}

bool bit_equal(const BtaMatrix& x, const BtaMatrix& y) {
    auto all = [](const std::vector<Block>& p, const std::vector<Block>& q) {
        return p.size() == q.size() &&
               std::equal(p.begin(), p.end(), q.begin(),
                          [](const Block& u, const Block& v) { return bit_equal(u, v); });
    };
    return x.n == y.n && x.b == y.b && x.a == y.a && all(x.diag, y.diag) &&
           all(x.lower, y.lower) && all(x.arrow, y.arrow) && bit_equal(x.tip, y.tip);
}

double max_relative_error(const BtaMatrix& x, const BtaMatrix& reference) {
    if (x.n != reference.n || x.b != reference.b || x.a != reference.a) {
        throw Error(Errc::ShapeMismatch, "matrices have different BTA shapes");
    }
    double diff = 0.0;
    double scale = 0.0;
    auto visit = [&](const std::vector<Block>& p, const std::vector<Block>& q) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            diff = std::max(diff, max_abs_diff(p[i], q[i]));
            scale = std::max(scale, max_abs(q[i]));
        }
    };
    visit(x.diag, reference.diag);
    visit(x.lower, reference.lower);
    visit(x.arrow, reference.arrow);
    diff = std::max(diff, max_abs_diff(x.tip, reference.tip));
    scale = std::max(scale, max_abs(reference.tip));
    if (scale == 0.0) {
        return diff;
    }
    return diff / scale;
}

}  // namespace serinv
