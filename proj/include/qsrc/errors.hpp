#pragma once

#include <stdexcept>
#include <string>

namespace qsrc {

/// Invalid argument value (non-positive mass, coincident points, NaN, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Argument outside the representable range of a function (Airy overflow).
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// A formula was called outside its region of validity.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The requested operation is not defined for the given source model.
class UnsupportedModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Quadrature or extrapolation failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double error_estimate)
        : std::runtime_error(what), error_estimate_(error_estimate) {}

    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

/// Output file could not be written, or an input file could not be read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qsrc
