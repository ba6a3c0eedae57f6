#ifndef DYADINT_ERRORS_HPP
#define DYADINT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dyadint {

// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input (expressions, box literals, numbers, JSON files).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    explicit ParseError(const std::string& what) : Error(what), position_(0) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Expression refers to a variable beyond the declared dimension, or
// operands disagree on dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Division by an enclosure containing zero, sqrt of a negative enclosure, ...
class DomainError : public Error {
public:
    using Error::Error;
};

// Caller violated a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Two enclosures of the same quantity failed to intersect. Always a bug.
class SoundnessError : public Error {
public:
    using Error::Error;
};

} // namespace dyadint

#endif
