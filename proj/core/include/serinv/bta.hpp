#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "serinv/block.hpp"
#include "serinv/error.hpp"

namespace serinv {

// Block tridiagonal arrowhead matrix:
//   diag[i]   block (i, i),   b x b, i < n
//   lower[i]  block (i+1, i), b x b, i < n-1
//   arrow[i]  block (n, i),   a x b, i < n
//   tip       block (n, n),   a x a
// Only the lower half is stored; the dense matrix is symmetric.
struct BtaMatrix {
    std::size_t n = 0;
    std::size_t b = 0;
    std::size_t a = 0;
    bool symmetric = true;
    std::vector<Block> diag;
    std::vector<Block> lower;
    std::vector<Block> arrow;
    Block tip;

    static BtaMatrix zeros(std::size_t n, std::size_t b, std::size_t a);
    static BtaMatrix identity(std::size_t n, std::size_t b, std::size_t a);

    std::size_t dimension() const { return n * b + a; }

    friend bool operator==(const BtaMatrix&, const BtaMatrix&) = default;
};

// The selected inverse shares the BTA block layout.
using SelectedInverse = BtaMatrix;

struct Diagnostic {
    Errc code;
    std::string message;
};

// Every violated invariant, shape problems first.
std::vector<Diagnostic> diagnose(const BtaMatrix& m);

// Throws the first diagnostic, if any.
void validate(const BtaMatrix& m);

BtaMatrix generate_spd_bta(std::uint64_t seed, std::size_t n, std::size_t b,
                           std::size_t a, double density);

Block to_dense(const BtaMatrix& m);
BtaMatrix extract_pattern(const Block& dense, std::size_t n, std::size_t b, std::size_t a);

bool bit_equal(const BtaMatrix& x, const BtaMatrix& y);

// max |x - y| over the pattern divided by max |y|.
double max_relative_error(const BtaMatrix& x, const BtaMatrix& reference);

inline constexpr std::uint32_t kBtaFormatVersion = 1;
inline constexpr std::size_t kBtaHeaderBytes = 36;

std::uint64_t bta_file_bytes(std::uint64_t n, std::uint64_t b, std::uint64_t a);

void write_bta(const std::filesystem::path& path, const BtaMatrix& m);
BtaMatrix read_bta(const std::filesystem::path& path);

}  // namespace serinv
