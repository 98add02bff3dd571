#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gdpc {

enum class ErrorKind {
    encoding,
    malformed_buffer,
    pattern_syntax,
    pattern_ambiguous,
    unsupported_parameter,
    coverage,
    length_mismatch,
    corrupt_stream,
    format,
    invalid_argument,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// A reading field outside its valid range.
class EncodingError : public Error {
public:
    explicit EncodingError(std::string field)
        : Error(ErrorKind::encoding, "field '" + field + "' out of range"), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Unexpected tag or truncation while decoding an encoded buffer.
class MalformedBufferError : public Error {
public:
    MalformedBufferError(std::size_t offset, const std::string& detail)
        : Error(ErrorKind::malformed_buffer,
                "malformed buffer at offset " + std::to_string(offset) + ": " + detail),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// The pattern body does not tile the buffer.
class CoverageError : public Error {
public:
    CoverageError(std::size_t stride, std::size_t remainder, const std::string& detail)
        : Error(ErrorKind::coverage, detail), stride_(stride), remainder_(remainder) {}

    std::size_t stride() const noexcept { return stride_; }
    std::size_t remainder() const noexcept { return remainder_; }

private:
    std::size_t stride_;
    std::size_t remainder_;
};

} // namespace gdpc
