#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "serinv/bta.hpp"

namespace serinv {

static_assert(std::endian::native == std::endian::little,
              "the container format is little-endian and stored without byte swapping");

namespace {

constexpr std::array<char, 4> kMagic = {'B', 'T', 'A', '1'};
constexpr std::uint32_t kFlagSymmetric = 1u;

template <typename T>
void put(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw Error(Errc::TruncatedFile, path.string() + ": header is incomplete");
    }
    return value;
}

void put_block(std::ofstream& out, const Block& x) {
    out.write(reinterpret_cast<const char*>(x.data()),
              static_cast<std::streamsize>(x.size() * sizeof(double)));
}

void get_block(std::ifstream& in, Block& x, const std::filesystem::path& path) {
    auto bytes = static_cast<std::streamsize>(x.size() * sizeof(double));
    if (bytes > 0 && !in.read(reinterpret_cast<char*>(x.data()), bytes)) {
        throw Error(Errc::TruncatedFile, path.string() + ": payload ends mid-block");
    }
}

// Overflow-checked a * b.
bool mul(std::uint64_t x, std::uint64_t y, std::uint64_t& out) {
    if (x != 0 && y > std::numeric_limits<std::uint64_t>::max() / x) {
        return false;
    }
    out = x * y;
    return true;
}

bool payload_doubles(std::uint64_t n, std::uint64_t b, std::uint64_t a, std::uint64_t& out) {
    std::uint64_t bb = 0, ab = 0, aa = 0, d = 0, l = 0, r = 0;
    if (!mul(b, b, bb) || !mul(a, b, ab) || !mul(a, a, aa) || !mul(n, bb, d) ||
        !mul(n > 0 ? n - 1 : 0, bb, l) || !mul(n, ab, r)) {
        return false;
    }
    out = d + l + r + aa;
    return out >= d;
}

}  // namespace

std::uint64_t bta_file_bytes(std::uint64_t n, std::uint64_t b, std::uint64_t a) {
    std::uint64_t doubles = 0;
    if (!payload_doubles(n, b, a, doubles)) {
        throw Error(Errc::ShapeMismatch, "matrix size overflows the container format");
    }
    return kBtaHeaderBytes + doubles * sizeof(double);
}

void write_bta(const std::filesystem::path& path, const BtaMatrix& m) {
    validate(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    }
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kBtaFormatVersion);
    put<std::uint32_t>(out, m.symmetric ? kFlagSymmetric : 0u);
    put<std::uint64_t>(out, m.n);
    put<std::uint64_t>(out, m.b);
    put<std::uint64_t>(out, m.a);
    for (const auto& d : m.diag) put_block(out, d);
    for (const auto& l : m.lower) put_block(out, l);
    for (const auto& r : m.arrow) put_block(out, r);
    put_block(out, m.tip);
    out.flush();
    if (!out) {
        throw Error(Errc::IoError, "write to " + path.string() + " failed");
    }
}

BtaMatrix read_bta(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + path.string());
    }
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size())) {
        throw Error(Errc::TruncatedFile, path.string() + ": header is incomplete");
    }
    if (magic != kMagic) {
        throw Error(Errc::BadMagic, path.string() + " is not a BTA container");
    }
    auto version = get<std::uint32_t>(in, path);
    if (version != kBtaFormatVersion) {
        throw Error(Errc::UnsupportedVersion,
                    path.string() + ": version " + std::to_string(version));
    }
    auto flags = get<std::uint32_t>(in, path);
    auto n = get<std::uint64_t>(in, path);
    auto b = get<std::uint64_t>(in, path);
    auto a = get<std::uint64_t>(in, path);
    if (n < 1 || b < 1) {
        throw Error(Errc::ShapeMismatch, path.string() + ": n and b must be positive");
    }

    // Compare against the real size before allocating anything.
    std::uint64_t doubles = 0;
    if (!payload_doubles(n, b, a, doubles) ||
        doubles > std::numeric_limits<std::uint64_t>::max() / sizeof(double)) {
        throw Error(Errc::TruncatedFile, path.string() + ": header sizes exceed the file");
    }
    std::error_code ec;
    auto actual = std::filesystem::file_size(path, ec);
    if (!ec && actual < kBtaHeaderBytes + doubles * sizeof(double)) {
        throw Error(Errc::TruncatedFile, path.string() + ": payload ends mid-block");
    }

    BtaMatrix m = BtaMatrix::zeros(n, b, a);
    m.symmetric = (flags & kFlagSymmetric) != 0;
    for (auto& d : m.diag) get_block(in, d, path);
    for (auto& l : m.lower) get_block(in, l, path);
    for (auto& r : m.arrow) get_block(in, r, path);
    get_block(in, m.tip, path);
    return m;
}

}  // namespace serinv
