#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rangeloc {

enum class ErrorCode {
    CoincidentCenters,
    IndexOverflow,
    ZeroIndex,
    IndexClash,
    NoPeak,
    AmbiguousSpectrum,
    SingularSystem,
    DegenerateRadius,
    AmbiguousSign,
    NoWindow,
    EmptyNeighborhood,
    InvalidArgument,
    Parse,
    Validation,
    Diverged,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base for every error raised by the library. Callers that need to tell
/// estimator failures apart (the simulator gates on them) switch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorCode::Validation, what) {}
};

}  // namespace rangeloc
