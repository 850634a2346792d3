#pragma once

#include <stdexcept>
#include <string>

namespace modeplan {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A vertex sits deeper than 10x the activation distance inside a primitive.
class DeepPenetration : public Error {
public:
    using Error::Error;
};

class TooManyContacts : public Error {
public:
    using Error::Error;
};

class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

/// The QP solver ran out of iterations; distinct from a certified infeasible outcome.
class SolverIterationLimit : public Error {
public:
    using Error::Error;
};

/// Task or trajectory file rejected. `field()` is a JSON pointer to the offending entry.
class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace modeplan
