#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace serinv {

// Dense row-major block of doubles. Zero-sized blocks are valid and are
// how a missing arrowhead (a = 0) is represented.
class Block {
  public:
    Block() = default;
    Block(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Block identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    Block transposed() const;

    bool same_shape(const Block& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Block&, const Block&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double max_abs(const Block& x);
double max_abs_diff(const Block& x, const Block& y);

// Byte-level equality, distinguishing -0.0 from 0.0 and comparing NaN payloads.
bool bit_equal(const Block& x, const Block& y);

Block vstack(const Block& top, const Block& bottom);
Block hstack(const Block& left, const Block& right);
Block row_range(const Block& x, std::size_t begin, std::size_t count);
Block col_range(const Block& x, std::size_t begin, std::size_t count);

// Writes src into dst with its top-left corner at (row, col).
void place(Block& dst, const Block& src, std::size_t row, std::size_t col);

}  // namespace serinv
