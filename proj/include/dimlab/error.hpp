#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dimlab {

enum class ErrorCode {
    DimensionMismatch,
    SingularGram,
    RegimeViolation,
    InvalidRepeatCount,
    InvalidDim,
    InvalidArgument,
    DoubleAugmentation,
    DegenerateRange,
    EmptyGrid,
    Config,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::InvalidRepeatCount: return "InvalidRepeatCount";
    case ErrorCode::InvalidDim: return "InvalidDim";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DoubleAugmentation: return "DoubleAugmentation";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the sweep harness in particular) can classify it without
/// parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace dimlab
