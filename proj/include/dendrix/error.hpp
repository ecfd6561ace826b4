#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dendrix {

enum class ErrorCode {
    // metric validation
    BadShape,
    NonFinite,
    NegativeEntry,
    Asymmetry,
    NonzeroDiagonal,
    ZeroOffDiagonal,
    TriangleViolation,
    DuplicateLabel,
    // geometry and construction
    EmptySubset,
    IndexOutOfRange,
    BadParams,
    DegenerateSpace,
    UnknownFormat,
    RootIsLeaf,
    NotEndpointMap,
    // dynamics
    IndexOverflow,
    ShortStream,
    CountTooLarge,
    // input/output
    Parse,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadShape: return "BadShape";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::Asymmetry: return "Asymmetry";
        case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
        case ErrorCode::ZeroOffDiagonal: return "ZeroOffDiagonal";
        case ErrorCode::TriangleViolation: return "TriangleViolation";
        case ErrorCode::DuplicateLabel: return "DuplicateLabel";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::DegenerateSpace: return "DegenerateSpace";
        case ErrorCode::UnknownFormat: return "UnknownFormat";
        case ErrorCode::RootIsLeaf: return "RootIsLeaf";
        case ErrorCode::NotEndpointMap: return "NotEndpointMap";
        case ErrorCode::IndexOverflow: return "IndexOverflow";
        case ErrorCode::ShortStream: return "ShortStream";
        case ErrorCode::CountTooLarge: return "CountTooLarge";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library. `witness()` carries the indices that
/// identify the offending entry (e.g. {i, j, k} for a triangle violation).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::vector<std::size_t> witness = {})
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          code_(code),
          witness_(std::move(witness)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::vector<std::size_t>& witness() const noexcept { return witness_; }

private:
    ErrorCode code_;
    std::vector<std::size_t> witness_;
};

}  // namespace dendrix
