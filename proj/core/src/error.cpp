#include "serinv/error.hpp"

namespace serinv {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::AsymmetryDetected: return "AsymmetryDetected";
        case Errc::InvalidDensity: return "InvalidDensity";
        case Errc::BadMagic: return "BadMagic";
        case Errc::TruncatedFile: return "TruncatedFile";
        case Errc::UnsupportedVersion: return "UnsupportedVersion";
        case Errc::IoError: return "IoError";
        case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
        case Errc::SingularTriangular: return "SingularTriangular";
        case Errc::TooFewBlocks: return "TooFewBlocks";
        case Errc::NestedInfeasible: return "NestedInfeasible";
        case Errc::InfeasibleParameters: return "InfeasibleParameters";
        case Errc::TransportFailure: return "TransportFailure";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message),
      code_(code) {}

Error Error::with_block(std::size_t index) const {
    std::string msg = what();
    auto colon = msg.find(": ");
    if (colon != std::string::npos) {
        msg = msg.substr(colon + 2);
    }
    Error e(code_, msg + " (diagonal block " + std::to_string(index) + ")");
    e.pivot = pivot;
    e.block = index;
    return e;
}

}  // namespace serinv
