#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sarlab {

/// Invalid parameters or configuration. `field()` holds a dotted path into the
/// offending config object when one is known (e.g. "aperture.dy").
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& message, std::string field = {})
        : std::invalid_argument(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed binary or text input; `offset()` is the byte position where parsing stopped.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::uint64_t offset)
        : std::runtime_error(message + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const char* message, const char* field = "") {
    if (!condition) throw ValidationError(message, field);
}

}  // namespace detail
}  // namespace sarlab
