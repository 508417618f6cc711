#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace semtx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class CodingError : public Error {
public:
    using Error::Error;
};

/// Raised when a Huffman stream ends inside a code word. Carries the bytes
/// that were decoded before the incomplete tail.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, std::vector<std::uint8_t> decoded)
        : Error(what), decoded_(std::move(decoded)) {}
    const std::vector<std::uint8_t>& decoded() const { return decoded_; }

private:
    std::vector<std::uint8_t> decoded_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class CompatibilityError : public Error {
public:
    using Error::Error;
};

class NonFiniteError : public Error {
public:
    using Error::Error;
};

} // namespace semtx
