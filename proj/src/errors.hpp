#ifndef SEPKERN_ERRORS_HPP
#define SEPKERN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sepkern {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument or precondition violation.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

// Evaluation or integration outside an atom's admissible domain
// (e.g. a Laurent atom at 0, or an integral across 0 of a negative power).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Numerical failure (quadrature non-convergence, inconsistent cross-checks).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Malformed JSON input (atoms, operators, scenarios).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

} // namespace sepkern

#endif
