#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfk {

enum class ErrorCode {
    EmptySignal,
    BadWindow,
    BadBoxCount,
    TooFewSamples,
    SizingViolation,
    SpecError,
    DepthTooLarge,
    GridTooCoarse,
    TooFewPoints,
    NeedsSweep,
    BadArgument,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::BadBoxCount: return "BadBoxCount";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SizingViolation: return "SizingViolation";
    case ErrorCode::SpecError: return "SpecError";
    case ErrorCode::DepthTooLarge: return "DepthTooLarge";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NeedsSweep: return "NeedsSweep";
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace mfk
