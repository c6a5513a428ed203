#ifndef EENET_ERRORS_HPP
#define EENET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eenet {

// Error categories mirrored one-to-one by the C API status codes.
enum class ErrorCode {
    InvalidArgument,
    Dimension,
    Parse,
    Validation,
    Range,
    Io,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct InputError : Error {
    explicit InputError(const std::string& what) : Error(ErrorCode::InvalidArgument, what) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& what) : Error(ErrorCode::Dimension, what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorCode::Parse, what) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorCode::Validation, what) {}
};

struct RangeError : Error {
    explicit RangeError(const std::string& what) : Error(ErrorCode::Range, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

} // namespace eenet

#endif
