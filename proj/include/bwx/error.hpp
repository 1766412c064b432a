#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bwx {

/// Identifies the failure class so callers (and the CLI) can react without
/// parsing messages.
enum class ErrorCode {
    Length,             ///< signal too short / frame-count shortfall
    Shape,              ///< array shapes or band widths disagree
    Domain,             ///< argument outside its valid range
    Numerical,          ///< NaN/Inf appeared during computation
    UnsupportedLayout,  ///< band layout the requested method cannot serve
    Io,                 ///< open/read/write failure
    BadMagic,
    Truncated,
    PayloadLength,
    NanPayload,
    NegativeMagnitude,
    UnsupportedCodec,
    MalformedHeader,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Length: return "length error";
        case ErrorCode::Shape: return "shape error";
        case ErrorCode::Domain: return "domain error";
        case ErrorCode::Numerical: return "numerical error";
        case ErrorCode::UnsupportedLayout: return "unsupported layout";
        case ErrorCode::Io: return "I/O error";
        case ErrorCode::BadMagic: return "bad magic";
        case ErrorCode::Truncated: return "truncated file";
        case ErrorCode::PayloadLength: return "payload length mismatch";
        case ErrorCode::NanPayload: return "non-finite payload";
        case ErrorCode::NegativeMagnitude: return "negative magnitude";
        case ErrorCode::UnsupportedCodec: return "unsupported codec";
        case ErrorCode::MalformedHeader: return "malformed header";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    /// Message without the error-class prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) throw Error(code, what);
}

}  // namespace detail
}  // namespace bwx
