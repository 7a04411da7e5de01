#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace serinv {

enum class Errc {
    ShapeMismatch,
    AsymmetryDetected,
    InvalidDensity,
    BadMagic,
    TruncatedFile,
    UnsupportedVersion,
    IoError,
    NotPositiveDefinite,
    SingularTriangular,
    TooFewBlocks,
    NestedInfeasible,
    InfeasibleParameters,
    TransportFailure,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message);

    Errc code() const { return code_; }

    // Pivot row inside the failing block (factorization errors).
    std::optional<std::size_t> pivot;
    // Global diagonal block index the failure belongs to, when known.
    std::optional<std::size_t> block;

    // Copy with the block index attached and the message extended.
    Error with_block(std::size_t index) const;

  private:
    Errc code_;
};

}  // namespace serinv
